// Copyright 2026 The vulnexp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vulnexp/config.h"

#include <cstdlib>

#include "vulnexp/util.h"

namespace vulnexp {

namespace fs = std::filesystem;

std::string_view ProviderModeName(ProviderMode mode) {
  switch (mode) {
    case ProviderMode::kNone: return "none";
    case ProviderMode::kLive: return "live";
    case ProviderMode::kReplay: return "replay";
  }
  return "none";
}

std::optional<ProviderMode> ParseProviderMode(std::string_view text) {
  std::string lower = ToLower(text);
  if (lower == "none") return ProviderMode::kNone;
  if (lower == "live") return ProviderMode::kLive;
  if (lower == "replay") return ProviderMode::kReplay;
  return std::nullopt;
}

EnvLookup ProcessEnv() {
  return [](const char* name) -> std::optional<std::string> {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
}

void ParseListen(std::string_view text, AppConfig& config) {
  size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("listen address must be host:port");
  }
  int port = 0;
  for (char c : text.substr(colon + 1)) {
    if (c < '0' || c > '9') throw ConfigError("listen port must be numeric");
    port = port * 10 + (c - '0');
    if (port > 65535) throw ConfigError("listen port out of range");
  }
  config.listen_host = std::string(text.substr(0, colon));
  config.listen_port = port;
}

AppConfig LoadConfig(const std::optional<fs::path>& path, const EnvLookup& env) {
  AppConfig config;
  bool mode_explicit = false;
  if (path) {
    auto text = ReadFileBytes(*path);
    if (!text) throw ConfigError("cannot read config file " + path->filename().string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::parse_error& e) {
      // The parser message quotes input bytes, which may include a key.
      throw ConfigError("config file is not valid JSON (near byte " +
                        std::to_string(e.byte) + ")");
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    const fs::path base = path->parent_path();
    auto resolve = [&](const nlohmann::json& v) -> fs::path {
      fs::path p = v.get<std::string>();
      if (p.empty() || p.is_absolute()) return p;
      return base / p;
    };
    try {
      if (j.contains("listen")) ParseListen(j["listen"].get<std::string>(), config);
      if (j.contains("store_path")) config.store_path = resolve(j["store_path"]);
      if (j.contains("cwe_catalog")) config.cwe_catalog = resolve(j["cwe_catalog"]);
      if (j.contains("methods_catalog")) config.methods_catalog = resolve(j["methods_catalog"]);
      if (j.contains("ui_dir")) config.ui_dir = resolve(j["ui_dir"]);
      if (j.contains("templates_dir")) config.templates_dir = resolve(j["templates_dir"]);
      if (j.contains("model")) config.model_id = j["model"].get<std::string>();
      if (j.contains("temperature")) config.temperature = j["temperature"].get<double>();
      if (j.contains("max_output_tokens")) {
        config.max_output_tokens = j["max_output_tokens"].get<int>();
      }
      if (j.contains("include_catalog_context")) {
        config.include_catalog_context = j["include_catalog_context"].get<bool>();
      }
      if (j.contains("per_level_templates")) {
        config.per_level_templates = j["per_level_templates"].get<bool>();
      }
      if (j.contains("provider")) {
        const auto& p = j["provider"];
        if (p.contains("mode")) {
          auto mode = ParseProviderMode(p["mode"].get<std::string>());
          if (!mode) throw ConfigError("provider.mode must be none, live, or replay");
          config.provider.mode = *mode;
          mode_explicit = true;
        }
        if (p.contains("base_url")) config.provider.base_url = p["base_url"].get<std::string>();
        if (p.contains("api_key")) config.provider.api_key = p["api_key"].get<std::string>();
        if (p.contains("transcript")) config.provider.transcript = resolve(p["transcript"]);
        if (p.contains("record_transcript")) {
          config.provider.record_transcript = resolve(p["record_transcript"]);
        }
        if (p.contains("timeout_seconds")) {
          config.provider.timeout_seconds = p["timeout_seconds"].get<int>();
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file has a field of the wrong type: ") + e.what());
    }
  }

  if (auto v = env("LLM_API_KEY")) {
    config.provider.api_key = *v;
    if (!mode_explicit) config.provider.mode = ProviderMode::kLive;
  }
  if (auto v = env("LLM_BASE_URL")) config.provider.base_url = *v;
  if (auto v = env("LLM_MODEL")) config.model_id = *v;
  if (auto v = env("VULNEXP_LISTEN")) ParseListen(*v, config);
  if (auto v = env("VULNEXP_STORE")) config.store_path = *v;
  return config;
}

std::shared_ptr<ChatProvider> MakeProvider(const ProviderSettings& settings) {
  std::shared_ptr<ChatProvider> provider;
  switch (settings.mode) {
    case ProviderMode::kNone:
      return nullptr;
    case ProviderMode::kReplay:
      if (settings.transcript.empty()) {
        throw ConfigError("replay mode needs provider.transcript");
      }
      return ReplayProvider::FromFile(settings.transcript);
    case ProviderMode::kLive:
      provider = std::make_shared<HttpChatProvider>(HttpProviderConfig{
          settings.base_url, settings.api_key,
          std::chrono::seconds(settings.timeout_seconds)});
      if (!settings.record_transcript.empty()) {
        provider = std::make_shared<RecordingProvider>(std::move(provider));
      }
      return provider;
  }
  return nullptr;
}

}  // namespace vulnexp
