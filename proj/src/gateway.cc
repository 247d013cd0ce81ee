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

#include "vulnexp/gateway.h"

#include <cstdio>
#include <fstream>
#include <regex>
#include <thread>

#include "httplib.h"
#include "vulnexp/util.h"

namespace vulnexp {

namespace {

using nlohmann::json;
using Kind = GatewayError::Kind;

int64_t ElapsedMs(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

std::string_view ChatRoleName(ChatRole role) {
  switch (role) {
    case ChatRole::kSystem: return "system";
    case ChatRole::kUser: return "user";
    case ChatRole::kAssistant: return "assistant";
  }
  return "user";
}

std::string_view FinishReasonName(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kError: return "error";
  }
  return "error";
}

std::string_view GatewayErrorKindName(Kind kind) {
  switch (kind) {
    case Kind::kAuth: return "AuthError";
    case Kind::kRateLimited: return "RateLimited";
    case Kind::kProvider: return "ProviderError";
    case Kind::kReplayMiss: return "ReplayMiss";
    case Kind::kTransient: return "TransientError";
    case Kind::kInvalidRequest: return "InvalidRequest";
    case Kind::kNotConfigured: return "NotConfigured";
  }
  return "GatewayError";
}

std::string RequestHash(const ChatRequest& request) {
  std::string canonical;
  for (const auto& m : request.messages) {
    canonical += ChatRoleName(m.role);
    canonical += '\n';
    canonical += std::to_string(m.content.size());
    canonical += '\n';
    canonical += m.content;
    canonical += '\n';
  }
  canonical += "model\n" + request.model_id + "\n";
  char temp[32];
  std::snprintf(temp, sizeof(temp), "%.4f", request.temperature);
  canonical += "temperature\n";
  canonical += temp;
  return Sha256Hex(canonical);
}

void ValidateRequest(const ChatRequest& request) {
  if (request.messages.empty()) {
    throw GatewayError(Kind::kInvalidRequest, "chat request has no messages");
  }
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw GatewayError(Kind::kInvalidRequest,
                       "temperature must be within [0, 2]");
  }
  if (request.max_output_tokens < 1) {
    throw GatewayError(Kind::kInvalidRequest,
                       "max_output_tokens must be positive");
  }
}

std::string Redact(std::string_view text, std::string_view secret) {
  std::string out(text);
  if (secret.empty()) return out;
  size_t pos = 0;
  while ((pos = out.find(secret, pos)) != std::string::npos) {
    out.replace(pos, secret.size(), "[redacted]");
    pos += 10;
  }
  return out;
}

// HttpChatProvider ----------------------------------------------------------

HttpChatProvider::HttpChatProvider(HttpProviderConfig config)
    : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, kUrl)) {
    throw GatewayError(Kind::kNotConfigured,
                       "LLM base URL must start with http:// or https://");
  }
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : std::string();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') {
    path_prefix_.pop_back();
  }
}

ChatResponse HttpChatProvider::Complete(const ChatRequest& request) {
  if (config_.api_key.empty()) {
    throw GatewayError(Kind::kAuth, "no LLM credential configured (LLM_API_KEY)");
  }
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", ChatRoleName(m.role)}, {"content", m.content}});
  }
  const json body = {{"model", request.model_id},
                     {"messages", std::move(messages)},
                     {"temperature", request.temperature},
                     {"max_tokens", request.max_output_tokens}};

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  client.set_bearer_token_auth(config_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(),
                         "application/json");
  if (!res) {
    throw GatewayError(Kind::kTransient,
                       "LLM request failed: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw GatewayError(Kind::kAuth,
                       "LLM provider rejected the credential (HTTP " +
                           std::to_string(status) + ")");
  }
  if (status == 429) {
    throw GatewayError(Kind::kRateLimited, "LLM provider rate limited (HTTP 429)");
  }
  if (status >= 500) {
    throw GatewayError(Kind::kTransient,
                       "LLM provider error (HTTP " + std::to_string(status) + ")");
  }
  if (status != 200) {
    throw GatewayError(Kind::kProvider,
                       "LLM provider returned HTTP " + std::to_string(status) +
                           ": " + Redact(res->body.substr(0, 200), config_.api_key));
  }

  ChatResponse out;
  out.latency_ms = ElapsedMs(started);
  out.provider = "live";
  try {
    const json payload = json::parse(res->body);
    const json& choice = payload.at("choices").at(0);
    const json& content = choice.at("message").at("content");
    out.content = content.is_string() ? content.get<std::string>() : std::string();
    out.model_id = payload.value("model", request.model_id);
    const std::string reason =
        choice.contains("finish_reason") && choice["finish_reason"].is_string()
            ? choice["finish_reason"].get<std::string>()
            : std::string("stop");
    out.finish_reason = reason == "stop"     ? FinishReason::kStop
                        : reason == "length" ? FinishReason::kLength
                                             : FinishReason::kError;
  } catch (const json::exception&) {
    throw GatewayError(Kind::kProvider, "malformed LLM provider payload");
  }
  if (out.finish_reason == FinishReason::kStop && out.content.empty()) {
    throw GatewayError(Kind::kProvider, "LLM provider returned empty content");
  }
  return out;
}

// Transcripts ---------------------------------------------------------------

std::vector<TranscriptEntry> LoadTranscript(const std::filesystem::path& path) {
  auto text = ReadFileBytes(path);
  if (!text) {
    throw GatewayError(Kind::kNotConfigured,
                       "cannot read transcript " + path.filename().string());
  }
  std::vector<TranscriptEntry> entries;
  try {
    for (const auto& e : json::parse(*text)) {
      entries.push_back({e.at("request_hash").get<std::string>(),
                         e.at("content").get<std::string>(),
                         e.value("model_id", "")});
    }
  } catch (const json::exception& ex) {
    throw GatewayError(Kind::kNotConfigured,
                       "malformed transcript " + path.filename().string() +
                           ": " + ex.what());
  }
  return entries;
}

void SaveTranscript(const std::filesystem::path& path,
                    const std::vector<TranscriptEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) {
    out.push_back({{"request_hash", e.request_hash},
                   {"content", e.content},
                   {"model_id", e.model_id}});
  }
  std::ofstream f(path);
  f << out.dump(2) << '\n';
  if (!f) {
    throw std::runtime_error("cannot write transcript " +
                             path.filename().string());
  }
}

ReplayProvider::ReplayProvider(std::vector<TranscriptEntry> entries) {
  for (auto& e : entries) {
    std::string key = e.request_hash;
    entries_.insert_or_assign(std::move(key), std::move(e));
  }
}

std::shared_ptr<ReplayProvider> ReplayProvider::FromFile(
    const std::filesystem::path& path) {
  return std::make_shared<ReplayProvider>(LoadTranscript(path));
}

ChatResponse ReplayProvider::Complete(const ChatRequest& request) {
  const std::string hash = RequestHash(request);
  auto it = entries_.find(hash);
  if (it == entries_.end()) {
    throw GatewayError(Kind::kReplayMiss,
                       "no replay transcript for request " + hash.substr(0, 16) +
                           (request.request_tag.empty()
                                ? std::string()
                                : " (" + request.request_tag + ")"));
  }
  ChatResponse out;
  out.content = it->second.content;
  out.model_id = it->second.model_id.empty() ? request.model_id
                                             : it->second.model_id;
  out.finish_reason = FinishReason::kStop;
  out.latency_ms = 0;
  out.provider = "replay";
  return out;
}

ScriptedProvider::ScriptedProvider(Script script, std::string mode)
    : script_(std::move(script)), mode_(std::move(mode)) {}

ChatResponse ScriptedProvider::Complete(const ChatRequest& request) {
  ChatResponse out;
  out.content = script_(request);
  out.model_id = request.model_id;
  out.provider = mode_;
  out.finish_reason = FinishReason::kStop;
  return out;
}

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner)
    : inner_(std::move(inner)) {}

ChatResponse RecordingProvider::Complete(const ChatRequest& request) {
  ChatResponse out = inner_->Complete(request);
  const std::string hash = RequestHash(request);
  std::lock_guard lock(mu_);
  recorded_.insert_or_assign(hash, TranscriptEntry{hash, out.content, out.model_id});
  return out;
}

std::vector<TranscriptEntry> RecordingProvider::entries() const {
  std::lock_guard lock(mu_);
  std::vector<TranscriptEntry> out;
  for (const auto& [hash, e] : recorded_) out.push_back(e);
  return out;
}

void RecordingProvider::Save(const std::filesystem::path& path) const {
  SaveTranscript(path, entries());
}

// LlmGateway ----------------------------------------------------------------

LlmGateway::LlmGateway(std::shared_ptr<ChatProvider> provider,
                       RetryPolicy policy, Sleeper sleeper,
                       uint64_t jitter_seed)
    : provider_(std::move(provider)),
      policy_(policy),
      sleeper_(std::move(sleeper)),
      rng_(jitter_seed) {
  if (!provider_) {
    throw GatewayError(Kind::kNotConfigured, "no LLM provider configured");
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::chrono::milliseconds LlmGateway::Backoff(int retry) const {
  const double base =
      static_cast<double>(policy_.base_delay.count()) * double(1u << (retry - 1));
  double factor = 1.0;
  if (policy_.jitter > 0) {
    std::lock_guard lock(rng_mu_);
    std::uniform_real_distribution<double> dist(-policy_.jitter, policy_.jitter);
    factor += dist(rng_);
  }
  return std::chrono::milliseconds(static_cast<int64_t>(base * factor + 0.5));
}

void LlmGateway::Log(std::string_view message) const {
  if (log_) log_(message);
}

ChatResponse LlmGateway::Complete(const ChatRequest& request) const {
  ValidateRequest(request);
  for (int attempt = 0;; ++attempt) {
    ++attempts_;
    try {
      return provider_->Complete(request);
    } catch (const GatewayError& e) {
      if (!e.retryable()) throw;
      if (attempt >= policy_.max_retries) {
        if (e.kind() == Kind::kRateLimited) throw;
        throw GatewayError(Kind::kProvider,
                           std::string(e.what()) + " (retries exhausted)");
      }
      const auto delay = Backoff(attempt + 1);
      Log("retrying " + std::string(GatewayErrorKindName(e.kind())) + " for " +
          (request.request_tag.empty() ? std::string("request") : request.request_tag) +
          " in " + std::to_string(delay.count()) + " ms (attempt " +
          std::to_string(attempt + 2) + ")");
      sleeper_(delay);
    }
  }
}

std::vector<BatchResult> LlmGateway::CompleteBatch(
    std::span<const ChatRequest> requests, size_t parallelism) const {
  if (parallelism < 1) {
    throw GatewayError(Kind::kInvalidRequest, "parallelism must be at least 1");
  }
  std::vector<BatchResult> results(requests.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < requests.size(); i = next++) {
      try {
        results[i].response = Complete(requests[i]);
      } catch (const GatewayError& e) {
        results[i].error = e;
      } catch (const std::exception& e) {
        results[i].error = GatewayError(Kind::kProvider, e.what());
      }
    }
  };
  const size_t workers = std::min(parallelism, requests.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace vulnexp
