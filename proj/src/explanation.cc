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

#include "vulnexp/explanation.h"

#include <algorithm>
#include <regex>
#include <sstream>

namespace vulnexp {

namespace {

using nlohmann::json;

TimePoint FloorSeconds(TimePoint t) {
  return std::chrono::floor<std::chrono::seconds>(t);
}

TimePoint ParseTimestamp(const json& j, const char* field) {
  auto parsed = ParseIsoUtc(j.at(field).get<std::string>());
  if (!parsed) throw std::invalid_argument(std::string("bad timestamp in ") + field);
  return *parsed;
}

std::vector<std::string> SplitMitigations(std::string_view summary) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= summary.size()) {
    size_t end = summary.find_first_of(";\n", start);
    if (end == std::string_view::npos) end = summary.size();
    std::string_view part = Trim(summary.substr(start, end - start));
    if (!part.empty()) out.emplace_back(part);
    start = end + 1;
  }
  return out;
}

std::string JoinTrimmed(const std::vector<std::string_view>& lines) {
  size_t first = 0;
  size_t last = lines.size();
  while (first < last && Trim(lines[first]).empty()) ++first;
  while (last > first && Trim(lines[last - 1]).empty()) --last;
  std::string out;
  for (size_t i = first; i < last; ++i) {
    if (i > first) out += '\n';
    out += lines[i];
  }
  // Trailing spaces on the last line are noise from the model.
  while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sections

ParsedSections ParseSections(std::string_view raw) {
  static const std::regex kSection(
      R"(^ {0,3}##[ \t]+(cause|impact|mitigation)[ \t]*#*[ \t]*$)",
      std::regex::icase);
  static const std::regex kAnyHeading(R"(^ {0,3}#{1,2}([ \t].*)?$)");

  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < raw.size()) {
    size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }

  std::array<std::optional<std::string>, 3> found;  // cause, impact, mitigation
  int current = -1;
  std::vector<std::string_view> body;
  auto flush = [&] {
    if (current >= 0 && !found[current]) found[current] = JoinTrimmed(body);
    body.clear();
  };
  for (std::string_view line : lines) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(line.begin(), line.end(), m, kSection)) {
      flush();
      std::string name = ToLower(m[1].str());
      current = name == "cause" ? 0 : name == "impact" ? 1 : 2;
      if (found[current]) current = -1;  // repeated heading: ignore its body
      continue;
    }
    if (std::regex_match(line.begin(), line.end(), kAnyHeading)) {
      flush();
      current = -1;
      continue;
    }
    if (current >= 0) body.push_back(line);
  }
  flush();

  ParsedSections out;
  out.cause = found[0].value_or("");
  out.impact = found[1].value_or("");
  out.mitigation = found[2].value_or("");
  out.parse_ok = !out.cause.empty() && !out.impact.empty() && !out.mitigation.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Names and JSON

std::string_view CriterionName(Criterion c) {
  switch (c) {
    case Criterion::kRelevant: return "Relevant";
    case Criterion::kFaithful: return "Faithful";
    case Criterion::kConcise: return "Concise";
    case Criterion::kCoherent: return "Coherent";
    case Criterion::kAccuracy: return "Accuracy";
  }
  return "Relevant";
}

std::optional<Criterion> ParseCriterion(std::string_view text) {
  std::string lower = ToLower(text);
  for (Criterion c : kAllCriteria) {
    if (ToLower(CriterionName(c)) == lower) return c;
  }
  return std::nullopt;
}

std::string_view ThumbsName(Thumbs t) { return t == Thumbs::kUp ? "up" : "down"; }

std::optional<Thumbs> ParseThumbs(std::string_view text) {
  std::string lower = ToLower(text);
  if (lower == "up") return Thumbs::kUp;
  if (lower == "down") return Thumbs::kDown;
  return std::nullopt;
}

void to_json(json& j, const Explanation& e) {
  j = json{{"finding_fingerprint", e.finding_fingerprint},
           {"level", ExperienceLevelName(e.level)},
           {"cause", e.cause},
           {"impact", e.impact},
           {"mitigation", e.mitigation},
           {"vulnerability_type", e.vulnerability_type},
           {"severity", SeverityName(e.severity)},
           {"tool_confidence", e.tool_confidence},
           {"general_mitigations", e.general_mitigations},
           {"raw_text", e.raw_text},
           {"model_id", e.model_id},
           {"strategy", e.strategy},
           {"template_version", e.template_version},
           {"created_at", FormatIsoUtc(e.created_at)},
           {"parse_ok", e.parse_ok}};
}

void from_json(const json& j, Explanation& e) {
  j.at("finding_fingerprint").get_to(e.finding_fingerprint);
  auto level = ParseExperienceLevel(j.at("level").get<std::string>());
  if (!level) throw std::invalid_argument("bad explanation level");
  e.level = *level;
  j.at("cause").get_to(e.cause);
  j.at("impact").get_to(e.impact);
  j.at("mitigation").get_to(e.mitigation);
  j.at("vulnerability_type").get_to(e.vulnerability_type);
  auto severity = ParseSeverity(j.at("severity").get<std::string>());
  if (!severity) throw std::invalid_argument("bad explanation severity");
  e.severity = *severity;
  j.at("tool_confidence").get_to(e.tool_confidence);
  j.at("general_mitigations").get_to(e.general_mitigations);
  j.at("raw_text").get_to(e.raw_text);
  j.at("model_id").get_to(e.model_id);
  j.at("strategy").get_to(e.strategy);
  j.at("template_version").get_to(e.template_version);
  e.created_at = ParseTimestamp(j, "created_at");
  j.at("parse_ok").get_to(e.parse_ok);
}

void to_json(json& j, const Feedback& f) {
  j = json{{"finding_fingerprint", f.finding_fingerprint},
           {"level", ExperienceLevelName(f.level)},
           {"thumbs", ThumbsName(f.thumbs)},
           {"criteria", nullptr},
           {"comment", nullptr},
           {"created_at", FormatIsoUtc(f.created_at)}};
  if (f.criteria) {
    json c = json::object();
    for (const auto& [criterion, value] : *f.criteria) {
      c[std::string(CriterionName(criterion))] = value;
    }
    j["criteria"] = std::move(c);
  }
  if (f.comment) j["comment"] = *f.comment;
}

void from_json(const json& j, Feedback& f) {
  j.at("finding_fingerprint").get_to(f.finding_fingerprint);
  auto level = ParseExperienceLevel(j.at("level").get<std::string>());
  if (!level) throw FeedbackError(FeedbackError::Kind::kInvalid, "invalid level");
  f.level = *level;
  auto thumbs = ParseThumbs(j.at("thumbs").get<std::string>());
  if (!thumbs) throw FeedbackError(FeedbackError::Kind::kInvalid, "invalid thumbs value");
  f.thumbs = *thumbs;
  f.criteria.reset();
  if (j.contains("criteria") && !j["criteria"].is_null()) {
    std::map<Criterion, int> criteria;
    for (const auto& [name, value] : j["criteria"].items()) {
      auto c = ParseCriterion(name);
      if (!c) throw FeedbackError(FeedbackError::Kind::kInvalid, "unknown criterion: " + name);
      if (!value.is_number_integer()) {
        throw FeedbackError(FeedbackError::Kind::kInvalid, "criterion " + name + " must be an integer");
      }
      criteria[*c] = value.get<int>();
    }
    f.criteria = std::move(criteria);
  }
  f.comment.reset();
  if (j.contains("comment") && !j["comment"].is_null()) {
    f.comment = j["comment"].get<std::string>();
  }
  f.created_at = j.contains("created_at") ? ParseTimestamp(j, "created_at") : TimePoint{};
}

void ValidateFeedback(const Feedback& feedback) {
  if (feedback.finding_fingerprint.empty()) {
    throw FeedbackError(FeedbackError::Kind::kInvalid, "feedback needs a finding fingerprint");
  }
  if (!feedback.criteria) return;
  if (feedback.criteria->size() != kAllCriteria.size()) {
    throw FeedbackError(FeedbackError::Kind::kInvalid,
                        "criteria must rate all five of Relevant, Faithful, "
                        "Concise, Coherent, Accuracy");
  }
  for (const auto& [criterion, value] : *feedback.criteria) {
    if (value < 1 || value > 5) {
      throw FeedbackError(FeedbackError::Kind::kInvalid,
                          std::string(CriterionName(criterion)) + " rating " +
                              std::to_string(value) + " is outside 1..5");
    }
  }
}

std::string ExplanationKey::ToString() const {
  return finding_fingerprint + "|" + std::string(ExperienceLevelName(level)) + "|" +
         model_id + "|" + strategy + "|" + template_version;
}

// ---------------------------------------------------------------------------
// Feedback summary

FeedbackSummary Summarize(const std::vector<Feedback>& feedback,
                          const FeedbackFilter& filter) {
  std::vector<Criterion> criteria = filter.criteria;
  if (criteria.empty()) criteria.assign(kAllCriteria.begin(), kAllCriteria.end());

  FeedbackSummary summary;
  for (Criterion c : criteria) {
    CriterionDistribution row;
    row.criterion = c;
    summary.rows.push_back(row);
  }
  for (const Feedback& f : feedback) {
    if (filter.level && f.level != *filter.level) continue;
    if (filter.finding_fingerprint && f.finding_fingerprint != *filter.finding_fingerprint) {
      continue;
    }
    ++summary.feedback_count;
    (f.thumbs == Thumbs::kUp ? summary.thumbs_up : summary.thumbs_down)++;
    if (!f.criteria) continue;
    for (CriterionDistribution& row : summary.rows) {
      auto it = f.criteria->find(row.criterion);
      if (it == f.criteria->end() || it->second < 1 || it->second > 5) continue;
      ++row.counts[it->second - 1];
      ++row.total;
    }
  }
  for (CriterionDistribution& row : summary.rows) {
    for (size_t i = 0; i < row.counts.size(); ++i) {
      row.percentages[i] = row.total == 0 ? 0.0 : 100.0 * row.counts[i] / row.total;
    }
  }
  return summary;
}

nlohmann::json SummaryToJson(const FeedbackSummary& summary) {
  json rows = json::array();
  for (const CriterionDistribution& row : summary.rows) {
    rows.push_back({{"criterion", CriterionName(row.criterion)},
                    {"counts", row.counts},
                    {"percentages", row.percentages},
                    {"total", row.total}});
  }
  return json{{"feedback_count", summary.feedback_count},
              {"thumbs_up", summary.thumbs_up},
              {"thumbs_down", summary.thumbs_down},
              {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Service

ChatRequest BuildExplanationRequest(const Finding& finding, ExperienceLevel level,
                                    bool validate, const ExplanationServiceConfig& config) {
  ExplanationPromptOptions prompt_options = config.prompt;
  prompt_options.validate = validate;
  PromptBundle bundle = RenderExplanationPrompt(finding, level, prompt_options, config.templates);

  ChatRequest request;
  request.model_id = config.model_id;
  request.messages = {{ChatRole::kSystem, bundle.system_text},
                      {ChatRole::kUser, bundle.user_text}};
  request.temperature = config.temperature;
  request.max_output_tokens = config.max_output_tokens;
  request.request_tag = finding.fingerprint;
  return request;
}

ExplanationService::ExplanationService(Store& store,
                                       std::shared_ptr<const LlmGateway> gateway,
                                       ExplanationServiceConfig config, Clock clock)
    : store_(store),
      gateway_(std::move(gateway)),
      config_(std::move(config)),
      clock_(std::move(clock)) {}

ExplanationKey ExplanationService::KeyFor(const Finding& finding, ExperienceLevel level,
                                          bool validate) const {
  std::string strategy = "zero-shot";
  if (validate) strategy += "+validate";
  if (config_.prompt.include_catalog_context) strategy += "+catalog";
  if (config_.prompt.per_level_templates) strategy += "+per-level";
  return ExplanationKey{finding.fingerprint, level, config_.model_id, strategy,
                        config_.templates.version};
}

std::optional<Explanation> ExplanationService::Cached(const ExplanationKey& key) const {
  auto stored = store_.Get(Namespace::kExplanations, key.ToString());
  if (!stored) return std::nullopt;
  return stored->get<Explanation>();
}

std::vector<Explanation> ExplanationService::ExplanationsFor(
    std::string_view fingerprint) const {
  std::vector<Explanation> out;
  for (const auto& [key, value] :
       store_.List(Namespace::kExplanations, std::string(fingerprint) + "|")) {
    out.push_back(value.get<Explanation>());
  }
  return out;
}

ExplainResult ExplanationService::Explain(const Finding& finding, ExperienceLevel level,
                                          const ExplainOptions& options) {
  const ExplanationKey key = KeyFor(finding, level, options.validate);
  const std::string key_text = key.ToString();
  if (!options.force_refresh) {
    if (auto cached = Cached(key)) return {*std::move(cached), true};
  }

  std::promise<Explanation> promise;
  {
    std::unique_lock lock(inflight_mu_);
    auto it = inflight_.find(key_text);
    if (it != inflight_.end()) {
      std::shared_future<Explanation> shared = it->second;
      lock.unlock();
      return {shared.get(), true};
    }
    inflight_.emplace(key_text, promise.get_future().share());
  }
  auto release = [&] {
    std::lock_guard lock(inflight_mu_);
    inflight_.erase(key_text);
  };

  try {
    // Another caller may have finished between the cache probe and the
    // in-flight registration.
    if (!options.force_refresh) {
      if (auto cached = Cached(key)) {
        promise.set_value(*cached);
        release();
        return {*std::move(cached), true};
      }
    }
    Explanation e = Generate(finding, level, options.validate, key);
    promise.set_value(e);
    release();
    return {std::move(e), false};
  } catch (...) {
    promise.set_exception(std::current_exception());
    release();
    throw;
  }
}

Explanation ExplanationService::Generate(const Finding& finding, ExperienceLevel level,
                                         bool validate, const ExplanationKey& key) {
  if (!gateway_) {
    throw ExplainError(GatewayError(GatewayError::Kind::kNotConfigured,
                                    "no LLM provider configured"),
                       finding.fingerprint);
  }
  ChatRequest request = BuildExplanationRequest(finding, level, validate, config_);

  ++gateway_calls_;
  ChatResponse response;
  try {
    response = gateway_->Complete(request);
  } catch (const GatewayError& err) {
    throw ExplainError(err, finding.fingerprint);
  }

  ParsedSections sections = ParseSections(response.content);
  Explanation e;
  e.finding_fingerprint = finding.fingerprint;
  e.level = level;
  e.cause = sections.cause;
  e.impact = sections.impact;
  e.mitigation = sections.mitigation;
  e.parse_ok = sections.parse_ok;
  if (finding.cwe) {
    e.vulnerability_type = finding.cwe->cwe_id;
    if (!finding.cwe->name.empty()) e.vulnerability_type += ": " + finding.cwe->name;
    e.general_mitigations = SplitMitigations(finding.cwe->summary);
  } else {
    e.vulnerability_type = finding.rule_name.empty() ? finding.rule_id : finding.rule_name;
  }
  e.severity = finding.severity;
  e.tool_confidence = finding.tool_confidence.empty() ? "unreported" : finding.tool_confidence;
  e.raw_text = response.content;
  e.model_id = key.model_id;
  e.strategy = key.strategy;
  e.template_version = key.template_version;
  e.created_at = FloorSeconds(clock_());

  store_.Put(Namespace::kExplanations, key.ToString(), e);
  return e;
}

std::string ExplanationService::RecordFeedback(Feedback feedback) {
  ValidateFeedback(feedback);
  if (store_.List(Namespace::kExplanations, feedback.finding_fingerprint + "|").empty()) {
    throw FeedbackError(FeedbackError::Kind::kUnknownFinding,
                        "no explanation exists for finding " + feedback.finding_fingerprint);
  }
  if (feedback.created_at == TimePoint{}) feedback.created_at = clock_();
  feedback.created_at = FloorSeconds(feedback.created_at);
  return store_.Append(Namespace::kFeedback, feedback);
}

std::vector<Feedback> ExplanationService::ListFeedback(
    std::optional<std::string_view> fingerprint) const {
  std::vector<Feedback> out;
  for (const auto& [key, value] : store_.List(Namespace::kFeedback)) {
    Feedback f = value.get<Feedback>();
    if (fingerprint && f.finding_fingerprint != *fingerprint) continue;
    out.push_back(std::move(f));
  }
  return out;
}

FeedbackSummary ExplanationService::SummarizeFeedback(const FeedbackFilter& filter) const {
  return Summarize(ListFeedback(), filter);
}

void ExplanationService::ExportJsonLines(std::ostream& out) const {
  for (const auto& [key, value] : store_.List(Namespace::kExplanations)) {
    out << json{{"kind", "explanation"}, {"key", key}, {"value", value}}.dump() << '\n';
  }
  for (const auto& [key, value] : store_.List(Namespace::kFeedback)) {
    out << json{{"kind", "feedback"}, {"id", key}, {"value", value}}.dump() << '\n';
  }
}

}  // namespace vulnexp
