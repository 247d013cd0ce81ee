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

#ifndef VULNEXP_SARIF_H_
#define VULNEXP_SARIF_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace vulnexp {

// SARIF result level.
enum class SarifLevel { kError, kWarning, kNote };

// Three-tier severity shown to users.
enum class Severity { kHigh, kMedium, kLow };

std::string_view SarifLevelName(SarifLevel level);  // "error", ...
std::optional<SarifLevel> ParseSarifLevel(std::string_view text);
std::string_view SeverityName(Severity severity);   // "High", ...
std::optional<Severity> ParseSeverity(std::string_view text);

// Error->High, Warning->Medium, Note->Low.
Severity SeverityFromLevel(SarifLevel level);

struct CodeLocation {
  // Forward-slash path relative to the source root, or the verbatim URI
  // when it is absolute and outside the root (then `external` is set).
  std::string file_uri;
  int start_line = 1;
  std::optional<int> start_column;
  std::optional<int> end_line;
  bool external = false;

  bool operator==(const CodeLocation&) const = default;
};

struct RuleInfo {
  std::string rule_id;
  std::string rule_name;
  std::string short_description;
  std::optional<SarifLevel> default_severity;
  std::vector<std::string> tags;
  std::optional<std::string> confidence;
  // Stub created for a result whose ruleId has no rule descriptor.
  bool synthesized = false;

  bool operator==(const RuleInfo&) const = default;
};

struct RawResult {
  std::string rule_id;
  std::string message;
  std::optional<SarifLevel> level;  // absent when the result sets none
  CodeLocation location;
  // First threadFlow of the first codeFlow, in document order.
  std::vector<CodeLocation> thread_flow_steps;
  std::optional<std::string> confidence;

  bool operator==(const RawResult&) const = default;
};

struct SarifDocument {
  std::string schema_version;
  std::string tool_name;
  std::string tool_version;
  std::vector<RuleInfo> rules;
  std::vector<RawResult> results;

  const RuleInfo* FindRule(std::string_view rule_id) const;

  bool operator==(const SarifDocument&) const = default;
};

class SarifError : public std::runtime_error {
 public:
  enum class Kind { kMalformedJson, kNotSarif, kUnsupportedVersion };

  SarifError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view SarifErrorKindName(SarifError::Kind kind);

// Parses a SARIF 2.x log. All runs are flattened into one document; the tool
// is taken from the first run. Unknown properties are ignored.
// Throws SarifError.
SarifDocument ParseSarif(std::string_view raw_bytes);

// Emits the consumed subset of `doc` as a single-run SARIF 2.1.0 log.
// ParseSarif(SerializeSarif(d)) == d for every parsed document d.
nlohmann::json SerializeSarif(const SarifDocument& doc);

// Forward slashes, no leading "./", percent-escapes decoded. Absolute paths
// and URIs with a scheme are returned unchanged and reported as external.
CodeLocation NormalizeLocation(std::string_view uri, int start_line,
                               std::optional<int> start_column,
                               std::optional<int> end_line);

struct FlowStep {
  CodeLocation location;
  std::string snippet;  // trimmed source line; empty until filled in

  bool operator==(const FlowStep&) const = default;
};

struct DataFlow {
  FlowStep source;
  std::vector<FlowStep> intermediates;
  FlowStep sink;

  // source, intermediates..., sink
  std::vector<FlowStep> Steps() const;

  bool operator==(const DataFlow&) const = default;
};

// Absent for fewer than two steps. Otherwise the first step is the source,
// the last is the sink, and the rest are intermediates in order.
std::optional<DataFlow> ExtractDataFlow(const RawResult& result);

// Hash of (rule_id, file_uri, start_line, message, ordinal), where ordinal
// disambiguates identical tuples in document order.
std::string ComputeFingerprint(const RawResult& result, int ordinal);

void to_json(nlohmann::json& j, const CodeLocation& loc);
void from_json(const nlohmann::json& j, CodeLocation& loc);
void to_json(nlohmann::json& j, const FlowStep& step);
void from_json(const nlohmann::json& j, FlowStep& step);
void to_json(nlohmann::json& j, const DataFlow& flow);
void from_json(const nlohmann::json& j, DataFlow& flow);

}  // namespace vulnexp

#endif  // VULNEXP_SARIF_H_
