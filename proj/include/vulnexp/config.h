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

#ifndef VULNEXP_CONFIG_H_
#define VULNEXP_CONFIG_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vulnexp/gateway.h"
#include "vulnexp/prompt.h"

namespace vulnexp {

enum class ProviderMode { kNone, kLive, kReplay };

std::string_view ProviderModeName(ProviderMode mode);
std::optional<ProviderMode> ParseProviderMode(std::string_view text);

struct ProviderSettings {
  ProviderMode mode = ProviderMode::kNone;
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;  // never serialized
  std::filesystem::path transcript;         // replay input
  std::filesystem::path record_transcript;  // live responses saved here
  int timeout_seconds = 60;
};

struct AppConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8777;
  std::filesystem::path store_path = "vulnexp.db";
  std::filesystem::path cwe_catalog;      // empty: built-in catalog
  std::filesystem::path methods_catalog;  // empty: built-in catalog
  std::filesystem::path ui_dir;           // empty: no static files
  std::filesystem::path templates_dir;    // empty: built-in templates
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  bool include_catalog_context = false;
  bool per_level_templates = false;
  ProviderSettings provider;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup ProcessEnv();

// Reads the JSON config (when `path` is set), then applies environment
// overrides: LLM_API_KEY, LLM_BASE_URL, LLM_MODEL, VULNEXP_LISTEN,
// VULNEXP_STORE. Relative paths in the file resolve against its directory.
// A key in the environment with no explicit provider mode selects live.
AppConfig LoadConfig(const std::optional<std::filesystem::path>& path,
                     const EnvLookup& env = ProcessEnv());

// Parses "host:port". Throws ConfigError.
void ParseListen(std::string_view text, AppConfig& config);

// Provider for the configured mode; null for kNone.
std::shared_ptr<ChatProvider> MakeProvider(const ProviderSettings& settings);

}  // namespace vulnexp

#endif  // VULNEXP_CONFIG_H_
