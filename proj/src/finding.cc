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

#include "vulnexp/finding.h"

namespace vulnexp {

using nlohmann::json;

std::string_view MethodCategoryName(MethodCategory category) {
  switch (category) {
    case MethodCategory::kSource: return "Source";
    case MethodCategory::kSink: return "Sink";
    case MethodCategory::kSanitizer: return "Sanitizer";
  }
  return "Sink";
}

std::optional<MethodCategory> ParseMethodCategory(std::string_view text) {
  if (text == "Source" || text == "source") return MethodCategory::kSource;
  if (text == "Sink" || text == "sink") return MethodCategory::kSink;
  if (text == "Sanitizer" || text == "sanitizer") {
    return MethodCategory::kSanitizer;
  }
  return std::nullopt;
}

std::string_view CriticalMethod::FinalIdentifier() const {
  std::string_view name = qualified_name;
  if (auto paren = name.find('('); paren != std::string_view::npos) {
    name = name.substr(0, paren);
  }
  const auto sep = name.find_last_of(".:#");
  return sep == std::string_view::npos ? name : name.substr(sep + 1);
}

void to_json(json& j, const CweEntry& e) {
  j = {{"cwe_id", e.cwe_id},
       {"name", e.name},
       {"summary", e.summary},
       {"rank", e.rank ? json(*e.rank) : json()}};
}

void from_json(const json& j, CweEntry& e) {
  e.cwe_id = j.at("cwe_id").get<std::string>();
  e.name = j.value("name", "");
  e.summary = j.value("summary", "");
  e.rank = std::nullopt;
  if (j.contains("rank") && !j["rank"].is_null()) e.rank = j["rank"].get<int>();
}

void to_json(json& j, const CriticalMethod& m) {
  j = {{"qualified_name", m.qualified_name},
       {"category", MethodCategoryName(m.category)},
       {"note", m.note}};
}

void from_json(const json& j, CriticalMethod& m) {
  m.qualified_name = j.at("qualified_name").get<std::string>();
  m.category = ParseMethodCategory(j.at("category").get<std::string>())
                   .value_or(MethodCategory::kSink);
  m.note = j.value("note", "");
}

void to_json(json& j, const Finding& f) {
  j = {{"fingerprint", f.fingerprint},
       {"rule_id", f.rule_id},
       {"rule_name", f.rule_name},
       {"rule_description", f.rule_description},
       {"message", f.message},
       {"severity", SeverityName(f.severity)},
       {"location", f.location},
       {"context", f.context},
       {"data_flow", f.data_flow ? json(*f.data_flow) : json()},
       {"cwe", f.cwe ? json(*f.cwe) : json()},
       {"critical_methods", f.critical_methods},
       {"tool_name", f.tool_name},
       {"tool_version", f.tool_version},
       {"rule_tags", f.rule_tags},
       {"tool_confidence", f.tool_confidence}};
}

void from_json(const json& j, Finding& f) {
  f.fingerprint = j.at("fingerprint").get<std::string>();
  f.rule_id = j.at("rule_id").get<std::string>();
  f.rule_name = j.at("rule_name").get<std::string>();
  f.rule_description = j.value("rule_description", "");
  f.message = j.at("message").get<std::string>();
  f.severity =
      ParseSeverity(j.at("severity").get<std::string>()).value_or(Severity::kMedium);
  f.location = j.at("location").get<CodeLocation>();
  f.context = j.at("context").get<CodeContext>();
  f.data_flow = std::nullopt;
  if (!j.at("data_flow").is_null()) f.data_flow = j["data_flow"].get<DataFlow>();
  f.cwe = std::nullopt;
  if (!j.at("cwe").is_null()) f.cwe = j["cwe"].get<CweEntry>();
  f.critical_methods = j.at("critical_methods").get<std::vector<CriticalMethod>>();
  f.tool_name = j.value("tool_name", "");
  f.tool_version = j.value("tool_version", "");
  f.rule_tags = j.value("rule_tags", std::vector<std::string>{});
  f.tool_confidence = j.value("tool_confidence", "unreported");
}

}  // namespace vulnexp
