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

#include "vulnexp/sarif.h"

#include <cctype>
#include <regex>
#include <set>

#include "vulnexp/util.h"

namespace vulnexp {

namespace {

using nlohmann::json;

const json* Child(const json& j, std::string_view key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

// Follows a chain of object keys; nullptr if any link is missing.
const json* Path(const json& j, std::initializer_list<std::string_view> keys) {
  const json* cur = &j;
  for (auto key : keys) {
    cur = Child(*cur, key);
    if (cur == nullptr) return nullptr;
  }
  return cur;
}

std::string StringAt(const json& j,
                     std::initializer_list<std::string_view> keys) {
  const json* v = Path(j, keys);
  return v != nullptr && v->is_string() ? v->get<std::string>() : std::string();
}

std::optional<int> PositiveIntAt(const json& j, std::string_view key) {
  const json* v = Child(j, key);
  if (v == nullptr || !v->is_number_integer()) return std::nullopt;
  const auto n = v->get<long long>();
  if (n < 1 || n > 1'000'000'000) return std::nullopt;
  return static_cast<int>(n);
}

std::string MessageText(const json& result) {
  std::string text = StringAt(result, {"message", "text"});
  if (text.empty()) text = StringAt(result, {"message", "markdown"});
  return text;
}

bool HasScheme(std::string_view uri) {
  const auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon < 2) return false;
  for (size_t i = 0; i < colon; ++i) {
    const auto c = static_cast<unsigned char>(uri[i]);
    if (!(std::isalnum(c) || c == '+' || c == '-' || c == '.')) return false;
  }
  return std::isalpha(static_cast<unsigned char>(uri[0]));
}

std::string PercentDecode(std::string_view s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() &&
        std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)),
                                                nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::string PercentEncode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c == '%' || c == ' ' || c < 0x20) {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

std::optional<CodeLocation> LocationFrom(const json& location) {
  const json* physical = Child(location, "physicalLocation");
  if (physical == nullptr) return std::nullopt;
  const json* uri = Path(*physical, {"artifactLocation", "uri"});
  if (uri == nullptr || !uri->is_string()) return std::nullopt;
  const json* region = Child(*physical, "region");
  int start_line = 1;
  std::optional<int> start_column;
  std::optional<int> end_line;
  if (region != nullptr) {
    start_line = PositiveIntAt(*region, "startLine").value_or(1);
    start_column = PositiveIntAt(*region, "startColumn");
    end_line = PositiveIntAt(*region, "endLine");
  }
  return NormalizeLocation(uri->get<std::string>(), start_line, start_column,
                           end_line);
}

std::vector<std::string> TagsOf(const json& obj) {
  std::vector<std::string> tags;
  if (const json* t = Path(obj, {"properties", "tags"});
      t != nullptr && t->is_array()) {
    for (const auto& tag : *t) {
      if (tag.is_string()) tags.push_back(tag.get<std::string>());
    }
  }
  return tags;
}

std::optional<std::string> ConfidenceOf(const json& obj) {
  const json* c = Path(obj, {"properties", "confidence"});
  if (c == nullptr) return std::nullopt;
  if (c->is_string()) return c->get<std::string>();
  if (c->is_number()) return c->dump();
  return std::nullopt;
}

// Semgrep encodes confidence as a tag such as "HIGH CONFIDENCE".
std::optional<std::string> ConfidenceFromTags(
    const std::vector<std::string>& tags) {
  static const std::regex kPattern(R"(^\s*(\S+)\s+CONFIDENCE\s*$)",
                                   std::regex::icase);
  for (const auto& tag : tags) {
    std::smatch m;
    if (std::regex_match(tag, m, kPattern)) return m[1].str();
  }
  return std::nullopt;
}

RuleInfo RuleFrom(const json& rule) {
  RuleInfo info;
  info.rule_id = StringAt(rule, {"id"});
  info.rule_name = StringAt(rule, {"name"});
  if (info.rule_name.empty()) info.rule_name = info.rule_id;
  info.short_description = StringAt(rule, {"shortDescription", "text"});
  if (const json* level = Path(rule, {"defaultConfiguration", "level"});
      level != nullptr && level->is_string()) {
    info.default_severity = ParseSarifLevel(level->get<std::string>());
  }
  info.tags = TagsOf(rule);
  info.confidence = ConfidenceOf(rule);
  if (!info.confidence) info.confidence = ConfidenceFromTags(info.tags);
  return info;
}

std::string ResultRuleId(const json& result, const json* run_rules) {
  std::string id = StringAt(result, {"ruleId"});
  if (!id.empty()) return id;
  id = StringAt(result, {"rule", "id"});
  if (!id.empty()) return id;
  const json* index = Child(result, "ruleIndex");
  if (index == nullptr) index = Path(result, {"rule", "index"});
  if (index != nullptr && index->is_number_integer() && run_rules != nullptr &&
      run_rules->is_array()) {
    const auto i = index->get<long long>();
    if (i >= 0 && static_cast<size_t>(i) < run_rules->size()) {
      return StringAt((*run_rules)[static_cast<size_t>(i)], {"id"});
    }
  }
  return "unknown-rule";
}

std::vector<CodeLocation> ThreadFlowSteps(const json& result) {
  std::vector<CodeLocation> steps;
  const json* flows = Child(result, "codeFlows");
  if (flows == nullptr || !flows->is_array() || flows->empty()) return steps;
  const json* threads = Child((*flows)[0], "threadFlows");
  if (threads == nullptr || !threads->is_array() || threads->empty()) {
    return steps;
  }
  const json* locations = Child((*threads)[0], "locations");
  if (locations == nullptr || !locations->is_array()) return steps;
  for (const auto& tfl : *locations) {
    const json* loc = Child(tfl, "location");
    if (loc == nullptr) continue;
    if (auto parsed = LocationFrom(*loc)) steps.push_back(std::move(*parsed));
  }
  return steps;
}

int MajorVersion(std::string_view version) {
  int major = 0;
  size_t i = 0;
  while (i < version.size() &&
         std::isdigit(static_cast<unsigned char>(version[i]))) {
    major = major * 10 + (version[i] - '0');
    ++i;
  }
  return i == 0 ? -1 : major;
}

json LocationToJson(const CodeLocation& loc) {
  json region = {{"startLine", loc.start_line}};
  if (loc.start_column) region["startColumn"] = *loc.start_column;
  if (loc.end_line) region["endLine"] = *loc.end_line;
  const std::string uri =
      loc.external ? loc.file_uri : PercentEncode(loc.file_uri);
  return {{"physicalLocation",
           {{"artifactLocation", {{"uri", uri}}}, {"region", region}}}};
}

}  // namespace

std::string_view SarifLevelName(SarifLevel level) {
  switch (level) {
    case SarifLevel::kError: return "error";
    case SarifLevel::kWarning: return "warning";
    case SarifLevel::kNote: return "note";
  }
  return "warning";
}

std::optional<SarifLevel> ParseSarifLevel(std::string_view text) {
  const std::string lower = ToLower(text);
  if (lower == "error") return SarifLevel::kError;
  if (lower == "warning") return SarifLevel::kWarning;
  if (lower == "note" || lower == "none") return SarifLevel::kNote;
  return std::nullopt;
}

std::string_view SeverityName(Severity severity) {
  switch (severity) {
    case Severity::kHigh: return "High";
    case Severity::kMedium: return "Medium";
    case Severity::kLow: return "Low";
  }
  return "Medium";
}

std::optional<Severity> ParseSeverity(std::string_view text) {
  const std::string lower = ToLower(text);
  if (lower == "high") return Severity::kHigh;
  if (lower == "medium") return Severity::kMedium;
  if (lower == "low") return Severity::kLow;
  return std::nullopt;
}

Severity SeverityFromLevel(SarifLevel level) {
  switch (level) {
    case SarifLevel::kError: return Severity::kHigh;
    case SarifLevel::kWarning: return Severity::kMedium;
    case SarifLevel::kNote: return Severity::kLow;
  }
  return Severity::kMedium;
}

std::string_view SarifErrorKindName(SarifError::Kind kind) {
  switch (kind) {
    case SarifError::Kind::kMalformedJson: return "MalformedJson";
    case SarifError::Kind::kNotSarif: return "NotSarif";
    case SarifError::Kind::kUnsupportedVersion: return "UnsupportedVersion";
  }
  return "SarifError";
}

const RuleInfo* SarifDocument::FindRule(std::string_view rule_id) const {
  for (const auto& rule : rules) {
    if (rule.rule_id == rule_id) return &rule;
  }
  return nullptr;
}

CodeLocation NormalizeLocation(std::string_view uri, int start_line,
                               std::optional<int> start_column,
                               std::optional<int> end_line) {
  CodeLocation loc;
  loc.start_line = std::max(1, start_line);
  loc.start_column = start_column;
  if (end_line && *end_line >= loc.start_line) loc.end_line = end_line;

  const bool absolute = !uri.empty() && (uri[0] == '/' || uri[0] == '\\');
  const bool drive = uri.size() > 2 && std::isalpha(static_cast<unsigned char>(uri[0])) &&
                     uri[1] == ':' && (uri[2] == '\\' || uri[2] == '/');
  if (absolute || drive || HasScheme(uri)) {
    loc.file_uri = std::string(uri);
    loc.external = true;
    return loc;
  }
  std::string path = PercentDecode(uri);
  for (char& c : path) {
    if (c == '\\') c = '/';
  }
  while (path.rfind("./", 0) == 0) path.erase(0, 2);
  loc.file_uri = std::move(path);
  return loc;
}

SarifDocument ParseSarif(std::string_view raw_bytes) {
  json root;
  try {
    root = json::parse(raw_bytes);
  } catch (const json::parse_error& e) {
    throw SarifError(SarifError::Kind::kMalformedJson,
                     std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw SarifError(SarifError::Kind::kNotSarif,
                     "not a SARIF log: top level is not an object");
  }
  const json* version = Child(root, "version");
  const json* runs = Child(root, "runs");
  if (version == nullptr || !version->is_string() || runs == nullptr ||
      !runs->is_array()) {
    throw SarifError(SarifError::Kind::kNotSarif,
                     "not a SARIF log: missing 'version' or 'runs'");
  }
  SarifDocument doc;
  doc.schema_version = version->get<std::string>();
  if (doc.schema_version.empty()) {
    throw SarifError(SarifError::Kind::kNotSarif,
                     "not a SARIF log: empty 'version'");
  }
  if (MajorVersion(doc.schema_version) != 2) {
    throw SarifError(SarifError::Kind::kUnsupportedVersion,
                     "unsupported SARIF version " + doc.schema_version);
  }

  std::set<std::string> seen_rules;
  for (size_t r = 0; r < runs->size(); ++r) {
    const json& run = (*runs)[r];
    const json* driver = Path(run, {"tool", "driver"});
    if (r == 0 && driver != nullptr) {
      doc.tool_name = StringAt(*driver, {"name"});
      doc.tool_version = StringAt(*driver, {"version"});
      if (doc.tool_version.empty()) {
        doc.tool_version = StringAt(*driver, {"semanticVersion"});
      }
    }
    const json* run_rules = driver != nullptr ? Child(*driver, "rules") : nullptr;
    if (run_rules != nullptr && run_rules->is_array()) {
      for (const auto& rule : *run_rules) {
        RuleInfo info = RuleFrom(rule);
        if (info.rule_id.empty()) continue;
        if (seen_rules.insert(info.rule_id).second) {
          doc.rules.push_back(std::move(info));
        }
      }
    }
    const json* results = Child(run, "results");
    if (results == nullptr || !results->is_array()) continue;
    for (const auto& result : *results) {
      RawResult raw;
      raw.rule_id = ResultRuleId(result, run_rules);
      raw.message = MessageText(result);
      if (const json* level = Child(result, "level");
          level != nullptr && level->is_string()) {
        raw.level = ParseSarifLevel(level->get<std::string>());
      }
      const json* locations = Child(result, "locations");
      std::optional<CodeLocation> loc;
      if (locations != nullptr && locations->is_array() && !locations->empty()) {
        loc = LocationFrom((*locations)[0]);
      }
      if (loc) {
        raw.location = std::move(*loc);
      } else {
        raw.location.file_uri = "<unknown>";
        raw.location.external = true;
      }
      raw.thread_flow_steps = ThreadFlowSteps(result);
      raw.confidence = ConfidenceOf(result);
      doc.results.push_back(std::move(raw));
    }
  }

  for (const auto& result : doc.results) {
    if (seen_rules.insert(result.rule_id).second) {
      RuleInfo stub;
      stub.rule_id = result.rule_id;
      stub.rule_name = result.rule_id;
      stub.synthesized = true;
      doc.rules.push_back(std::move(stub));
    }
  }
  return doc;
}

json SerializeSarif(const SarifDocument& doc) {
  json rules = json::array();
  for (const auto& rule : doc.rules) {
    if (rule.synthesized) continue;
    json r = {{"id", rule.rule_id}, {"name", rule.rule_name}};
    if (!rule.short_description.empty()) {
      r["shortDescription"] = {{"text", rule.short_description}};
    }
    if (rule.default_severity) {
      r["defaultConfiguration"] = {
          {"level", SarifLevelName(*rule.default_severity)}};
    }
    json props = json::object();
    if (!rule.tags.empty()) props["tags"] = rule.tags;
    // A confidence recovered from tags round-trips through the tags.
    if (rule.confidence && rule.confidence != ConfidenceFromTags(rule.tags)) {
      props["confidence"] = *rule.confidence;
    }
    if (!props.empty()) r["properties"] = std::move(props);
    rules.push_back(std::move(r));
  }

  json results = json::array();
  for (const auto& result : doc.results) {
    json r = {{"ruleId", result.rule_id},
              {"message", {{"text", result.message}}}};
    if (result.level) r["level"] = SarifLevelName(*result.level);
    if (result.location.file_uri != "<unknown>" || !result.location.external) {
      r["locations"] = json::array({LocationToJson(result.location)});
    }
    if (!result.thread_flow_steps.empty()) {
      json steps = json::array();
      for (const auto& step : result.thread_flow_steps) {
        steps.push_back({{"location", LocationToJson(step)}});
      }
      r["codeFlows"] = json::array(
          {{{"threadFlows", json::array({{{"locations", steps}}})}}});
    }
    if (result.confidence) r["properties"] = {{"confidence", *result.confidence}};
    results.push_back(std::move(r));
  }

  json driver = {{"name", doc.tool_name}, {"rules", std::move(rules)}};
  if (!doc.tool_version.empty()) driver["version"] = doc.tool_version;
  return {{"$schema", "https://json.schemastore.org/sarif-2.1.0.json"},
          {"version", doc.schema_version},
          {"runs", json::array({{{"tool", {{"driver", std::move(driver)}}},
                                 {"results", std::move(results)}}})}};
}

std::vector<FlowStep> DataFlow::Steps() const {
  std::vector<FlowStep> steps;
  steps.reserve(intermediates.size() + 2);
  steps.push_back(source);
  steps.insert(steps.end(), intermediates.begin(), intermediates.end());
  steps.push_back(sink);
  return steps;
}

std::optional<DataFlow> ExtractDataFlow(const RawResult& result) {
  const auto& steps = result.thread_flow_steps;
  if (steps.size() < 2) return std::nullopt;
  DataFlow flow;
  flow.source.location = steps.front();
  for (size_t i = 1; i + 1 < steps.size(); ++i) {
    flow.intermediates.push_back(FlowStep{steps[i], {}});
  }
  flow.sink.location = steps.back();
  return flow;
}

std::string ComputeFingerprint(const RawResult& result, int ordinal) {
  std::string key;
  for (const std::string& part :
       {result.rule_id, result.location.file_uri,
        std::to_string(result.location.start_line), result.message,
        std::to_string(ordinal)}) {
    key += std::to_string(part.size());
    key += ':';
    key += part;
    key += '\n';
  }
  return Sha256Hex(key).substr(0, 24);
}

void to_json(json& j, const CodeLocation& loc) {
  j = {{"file_uri", loc.file_uri},
       {"start_line", loc.start_line},
       {"start_column", loc.start_column ? json(*loc.start_column) : json()},
       {"end_line", loc.end_line ? json(*loc.end_line) : json()},
       {"external", loc.external}};
}

void from_json(const json& j, CodeLocation& loc) {
  loc.file_uri = j.at("file_uri").get<std::string>();
  loc.start_line = j.at("start_line").get<int>();
  loc.start_column = std::nullopt;
  loc.end_line = std::nullopt;
  if (j.contains("start_column") && !j["start_column"].is_null()) {
    loc.start_column = j["start_column"].get<int>();
  }
  if (j.contains("end_line") && !j["end_line"].is_null()) {
    loc.end_line = j["end_line"].get<int>();
  }
  loc.external = j.value("external", false);
}

void to_json(json& j, const FlowStep& step) {
  j = {{"location", step.location}, {"snippet", step.snippet}};
}

void from_json(const json& j, FlowStep& step) {
  step.location = j.at("location").get<CodeLocation>();
  step.snippet = j.value("snippet", "");
}

void to_json(json& j, const DataFlow& flow) {
  j = {{"source", flow.source},
       {"intermediates", flow.intermediates},
       {"sink", flow.sink}};
}

void from_json(const json& j, DataFlow& flow) {
  flow.source = j.at("source").get<FlowStep>();
  flow.intermediates = j.at("intermediates").get<std::vector<FlowStep>>();
  flow.sink = j.at("sink").get<FlowStep>();
}

}  // namespace vulnexp
