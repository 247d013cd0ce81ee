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

#ifndef VULNEXP_GATEWAY_H_
#define VULNEXP_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace vulnexp {

enum class ChatRole { kSystem, kUser, kAssistant };

std::string_view ChatRoleName(ChatRole role);  // "system", ...

struct ChatMessage {
  ChatRole role;
  std::string content;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;  // [0, 2]
  int max_output_tokens = 1024;
  std::string request_tag;  // caller correlation id; not part of the hash
};

enum class FinishReason { kStop, kLength, kError };

std::string_view FinishReasonName(FinishReason reason);

struct ChatResponse {
  std::string content;
  std::string model_id;
  FinishReason finish_reason = FinishReason::kStop;
  int64_t latency_ms = 0;
  std::string provider;
};

class GatewayError : public std::runtime_error {
 public:
  enum class Kind {
    kAuth,           // missing or rejected credential; never retried
    kRateLimited,    // HTTP 429, after retries are exhausted
    kProvider,       // malformed payload or non-retryable provider failure
    kReplayMiss,     // replay transcript lacks the request
    kTransient,      // 5xx or timeout; retried, then surfaced as kProvider
    kInvalidRequest, // request violates ChatRequest invariants
    kNotConfigured,  // no provider available
  };

  GatewayError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }
  bool retryable() const {
    return kind_ == Kind::kRateLimited || kind_ == Kind::kTransient;
  }

 private:
  Kind kind_;
};

std::string_view GatewayErrorKindName(GatewayError::Kind kind);

// Stable request key: SHA-256 over role, content (per message, in order),
// model id, and temperature printed with four decimals.
std::string RequestHash(const ChatRequest& request);

// Implementations must be safe for concurrent Complete calls.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
  // "live", "replay", "scripted", ...
  virtual std::string_view mode() const = 0;
};

struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::chrono::seconds timeout{60};
};

// Chat-completions over HTTP JSON with bearer auth:
// POST <base_url>/chat/completions {model, messages, temperature, max_tokens}.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config);
  ChatResponse Complete(const ChatRequest& request) override;
  std::string_view mode() const override { return "live"; }

 private:
  HttpProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

struct TranscriptEntry {
  std::string request_hash;
  std::string content;
  std::string model_id;
};

std::vector<TranscriptEntry> LoadTranscript(const std::filesystem::path& path);
void SaveTranscript(const std::filesystem::path& path,
                    const std::vector<TranscriptEntry>& entries);

// Answers from recorded transcripts keyed by RequestHash.
class ReplayProvider : public ChatProvider {
 public:
  explicit ReplayProvider(std::vector<TranscriptEntry> entries);
  static std::shared_ptr<ReplayProvider> FromFile(
      const std::filesystem::path& path);

  ChatResponse Complete(const ChatRequest& request) override;
  std::string_view mode() const override { return "replay"; }
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, TranscriptEntry> entries_;
};

// Answers with a caller-supplied function. Used for oracle benchmark runs
// and tests. Exceptions thrown by the function propagate unchanged.
class ScriptedProvider : public ChatProvider {
 public:
  using Script = std::function<std::string(const ChatRequest&)>;
  explicit ScriptedProvider(Script script, std::string mode = "scripted");
  ChatResponse Complete(const ChatRequest& request) override;
  std::string_view mode() const override { return mode_; }

 private:
  Script script_;
  std::string mode_;
};

// Forwards to another provider and records each successful exchange.
class RecordingProvider : public ChatProvider {
 public:
  explicit RecordingProvider(std::shared_ptr<ChatProvider> inner);
  ChatResponse Complete(const ChatRequest& request) override;
  std::string_view mode() const override { return inner_->mode(); }
  std::vector<TranscriptEntry> entries() const;
  void Save(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<ChatProvider> inner_;
  mutable std::mutex mu_;
  std::map<std::string, TranscriptEntry> recorded_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{1000};  // doubled per retry
  double jitter = 0.2;                          // +/- fraction of the delay
};

struct BatchResult {
  std::optional<ChatResponse> response;
  std::optional<GatewayError> error;

  bool ok() const { return response.has_value(); }
};

// Retrying front end over a provider. Shareable across threads.
class LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  using LogSink = std::function<void(std::string_view)>;

  explicit LlmGateway(std::shared_ptr<ChatProvider> provider,
                      RetryPolicy policy = {}, Sleeper sleeper = {},
                      uint64_t jitter_seed = 0x5eed);

  // Retries retryable failures up to policy.max_retries times with
  // exponential backoff. Throws GatewayError.
  ChatResponse Complete(const ChatRequest& request) const;

  // Responses in request order; at most `parallelism` requests in flight.
  // Failures are reported per slot.
  std::vector<BatchResult> CompleteBatch(std::span<const ChatRequest> requests,
                                         size_t parallelism) const;

  std::string_view provider_mode() const { return provider_->mode(); }
  ChatProvider& provider() const { return *provider_; }
  // Total provider invocations, retries included.
  uint64_t attempts() const { return attempts_.load(); }
  void set_log_sink(LogSink sink) { log_ = std::move(sink); }

 private:
  std::chrono::milliseconds Backoff(int retry) const;
  void Log(std::string_view message) const;

  std::shared_ptr<ChatProvider> provider_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  LogSink log_;
  mutable std::mutex rng_mu_;
  mutable std::mt19937_64 rng_;
  mutable std::atomic<uint64_t> attempts_{0};
};

// Validates the ChatRequest invariants; throws kInvalidRequest.
void ValidateRequest(const ChatRequest& request);

// Replaces every occurrence of `secret` in `text`.
std::string Redact(std::string_view text, std::string_view secret);

}  // namespace vulnexp

#endif  // VULNEXP_GATEWAY_H_
