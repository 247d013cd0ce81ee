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

#ifndef VULNEXP_FINDING_H_
#define VULNEXP_FINDING_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vulnexp/sarif.h"
#include "vulnexp/snippet.h"

namespace vulnexp {

struct CweEntry {
  std::string cwe_id;  // "CWE-<n>"
  std::string name;
  std::string summary;
  std::optional<int> rank;  // CWE Top 25 rank, 1..25

  bool operator==(const CweEntry&) const = default;
};

enum class MethodCategory { kSource, kSink, kSanitizer };

std::string_view MethodCategoryName(MethodCategory category);
std::optional<MethodCategory> ParseMethodCategory(std::string_view text);

struct CriticalMethod {
  std::string qualified_name;
  MethodCategory category = MethodCategory::kSink;
  std::string note;

  // "javax.servlet.http.HttpServletResponse.getWriter" -> "getWriter"
  std::string_view FinalIdentifier() const;

  bool operator==(const CriticalMethod&) const = default;
};

// One SARIF result with its code context, data flow, and catalog
// annotations.
struct Finding {
  std::string fingerprint;
  std::string rule_id;
  std::string rule_name;
  std::string rule_description;
  std::string message;
  Severity severity = Severity::kMedium;
  CodeLocation location;
  CodeContext context;
  std::optional<DataFlow> data_flow;
  std::optional<CweEntry> cwe;
  std::vector<CriticalMethod> critical_methods;
  std::string tool_name;
  std::string tool_version;
  std::vector<std::string> rule_tags;
  std::string tool_confidence = "unreported";

  bool operator==(const Finding&) const = default;
};

void to_json(nlohmann::json& j, const CweEntry& e);
void from_json(const nlohmann::json& j, CweEntry& e);
void to_json(nlohmann::json& j, const CriticalMethod& m);
void from_json(const nlohmann::json& j, CriticalMethod& m);
void to_json(nlohmann::json& j, const Finding& f);
void from_json(const nlohmann::json& j, Finding& f);

}  // namespace vulnexp

#endif  // VULNEXP_FINDING_H_
