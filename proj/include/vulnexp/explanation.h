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

#ifndef VULNEXP_EXPLANATION_H_
#define VULNEXP_EXPLANATION_H_

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vulnexp/finding.h"
#include "vulnexp/gateway.h"
#include "vulnexp/prompt.h"
#include "vulnexp/store.h"
#include "vulnexp/util.h"

namespace vulnexp {

using TimePoint = std::chrono::system_clock::time_point;

struct Explanation {
  std::string finding_fingerprint;
  ExperienceLevel level = ExperienceLevel::kBeginner;
  std::string cause;
  std::string impact;
  std::string mitigation;
  std::string vulnerability_type;
  Severity severity = Severity::kMedium;
  std::string tool_confidence;
  std::vector<std::string> general_mitigations;
  std::string raw_text;
  std::string model_id;
  std::string strategy;
  std::string template_version;
  TimePoint created_at;
  // False when the response lacked one of the three section headings.
  bool parse_ok = false;

  bool operator==(const Explanation&) const = default;
};

void to_json(nlohmann::json& j, const Explanation& e);
void from_json(const nlohmann::json& j, Explanation& e);

struct ParsedSections {
  std::string cause;
  std::string impact;
  std::string mitigation;
  bool parse_ok = false;

  bool operator==(const ParsedSections&) const = default;
};

// Splits on the level-2 headings "Cause", "Impact", "Mitigation" in any
// order and any letter case. A section runs until the next level-1 or
// level-2 heading. The first occurrence of a repeated heading wins.
ParsedSections ParseSections(std::string_view raw);

enum class Criterion { kRelevant, kFaithful, kConcise, kCoherent, kAccuracy };

inline constexpr std::array<Criterion, 5> kAllCriteria = {
    Criterion::kRelevant, Criterion::kFaithful, Criterion::kConcise,
    Criterion::kCoherent, Criterion::kAccuracy};

std::string_view CriterionName(Criterion c);  // "Relevant", ...
std::optional<Criterion> ParseCriterion(std::string_view text);

enum class Thumbs { kUp, kDown };

std::string_view ThumbsName(Thumbs t);  // "up" / "down"
std::optional<Thumbs> ParseThumbs(std::string_view text);

struct Feedback {
  std::string finding_fingerprint;
  ExperienceLevel level = ExperienceLevel::kBeginner;
  Thumbs thumbs = Thumbs::kUp;
  std::optional<std::map<Criterion, int>> criteria;
  std::optional<std::string> comment;
  TimePoint created_at;

  bool operator==(const Feedback&) const = default;
};

void to_json(nlohmann::json& j, const Feedback& f);
void from_json(const nlohmann::json& j, Feedback& f);

class FeedbackError : public std::runtime_error {
 public:
  enum class Kind { kUnknownFinding, kInvalid };

  FeedbackError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Throws FeedbackError(kInvalid) when criteria are present but do not
// cover exactly the five criteria with values in 1..5.
void ValidateFeedback(const Feedback& feedback);

struct ExplanationKey {
  std::string finding_fingerprint;
  ExperienceLevel level = ExperienceLevel::kBeginner;
  std::string model_id;
  std::string strategy;
  std::string template_version;

  // "<fingerprint>|<level>|<model>|<strategy>|<template_version>"
  std::string ToString() const;
};

struct FeedbackFilter {
  std::optional<ExperienceLevel> level;
  std::optional<std::string> finding_fingerprint;
  std::vector<Criterion> criteria;  // empty means all five
};

struct CriterionDistribution {
  Criterion criterion = Criterion::kRelevant;
  std::array<int, 5> counts{};          // index 0 holds rating 1
  std::array<double, 5> percentages{};  // of `total`; zeros when total is 0
  int total = 0;
};

struct FeedbackSummary {
  std::vector<CriterionDistribution> rows;
  int feedback_count = 0;
  int thumbs_up = 0;
  int thumbs_down = 0;
};

nlohmann::json SummaryToJson(const FeedbackSummary& summary);

struct ExplainOptions {
  bool validate = false;
  bool force_refresh = false;
};

struct ExplainResult {
  Explanation explanation;
  bool cache_hit = false;
};

struct ExplanationServiceConfig {
  std::string model_id = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  ExplanationPromptOptions prompt;  // `validate` is taken from ExplainOptions
  TemplateSet templates = TemplateSet::Builtin();
};

// The chat request explain sends for a cache miss.
ChatRequest BuildExplanationRequest(const Finding& finding, ExperienceLevel level,
                                    bool validate, const ExplanationServiceConfig& config);

// Thrown when explain fails at the gateway; carries the finding.
class ExplainError : public GatewayError {
 public:
  ExplainError(const GatewayError& cause, std::string fingerprint)
      : GatewayError(cause.kind(), "explain " + fingerprint + ": " + cause.what()),
        fingerprint_(std::move(fingerprint)) {}
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class ExplanationService {
 public:
  // `gateway` may be null; explain then fails with kNotConfigured on a
  // cache miss.
  ExplanationService(Store& store, std::shared_ptr<const LlmGateway> gateway,
                     ExplanationServiceConfig config = {},
                     Clock clock = SystemClock());

  // Concurrent calls with the same key share one gateway call.
  ExplainResult Explain(const Finding& finding, ExperienceLevel level,
                        const ExplainOptions& options = {});

  ExplanationKey KeyFor(const Finding& finding, ExperienceLevel level,
                        bool validate) const;
  std::optional<Explanation> Cached(const ExplanationKey& key) const;
  std::vector<Explanation> ExplanationsFor(std::string_view fingerprint) const;

  // Returns the stored id. Requires at least one stored explanation for the
  // finding (FeedbackError kUnknownFinding).
  std::string RecordFeedback(Feedback feedback);
  std::vector<Feedback> ListFeedback(
      std::optional<std::string_view> fingerprint = std::nullopt) const;
  FeedbackSummary SummarizeFeedback(const FeedbackFilter& filter = {}) const;

  // One JSON object per line: explanations first, then feedback.
  void ExportJsonLines(std::ostream& out) const;

  // Gateway calls issued by this service, not counting retries.
  uint64_t gateway_calls() const { return gateway_calls_.load(); }
  bool has_gateway() const { return gateway_ != nullptr; }
  const ExplanationServiceConfig& config() const { return config_; }

 private:
  Explanation Generate(const Finding& finding, ExperienceLevel level,
                       bool validate, const ExplanationKey& key);

  Store& store_;
  std::shared_ptr<const LlmGateway> gateway_;
  ExplanationServiceConfig config_;
  Clock clock_;
  std::atomic<uint64_t> gateway_calls_{0};
  std::mutex inflight_mu_;
  std::map<std::string, std::shared_future<Explanation>> inflight_;
};

// Combines the per-feedback distribution with the same arithmetic used by
// the service; exposed for offline summaries of exported feedback.
FeedbackSummary Summarize(const std::vector<Feedback>& feedback,
                          const FeedbackFilter& filter);

}  // namespace vulnexp

#endif  // VULNEXP_EXPLANATION_H_
