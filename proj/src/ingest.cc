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

#include "vulnexp/ingest.h"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include "vulnexp/util.h"

namespace vulnexp {

namespace fs = std::filesystem;

std::vector<Finding> NormalizeFindings(const SarifDocument& doc) {
  std::map<std::tuple<std::string, std::string, int, std::string>, int> seen;
  std::vector<Finding> findings;
  findings.reserve(doc.results.size());
  for (const auto& result : doc.results) {
    const int ordinal = seen[{result.rule_id, result.location.file_uri,
                              result.location.start_line, result.message}]++;
    Finding f;
    f.fingerprint = ComputeFingerprint(result, ordinal);
    f.rule_id = result.rule_id;
    f.message = result.message;
    f.location = result.location;
    f.tool_name = doc.tool_name;
    f.tool_version = doc.tool_version;
    f.data_flow = ExtractDataFlow(result);

    const RuleInfo* rule = doc.FindRule(result.rule_id);
    f.rule_name = rule != nullptr ? rule->rule_name : result.rule_id;
    if (rule != nullptr) {
      f.rule_description = rule->short_description;
      f.rule_tags = rule->tags;
    }
    if (result.level) {
      f.severity = SeverityFromLevel(*result.level);
    } else if (rule != nullptr && rule->default_severity) {
      f.severity = SeverityFromLevel(*rule->default_severity);
    } else {
      f.severity = Severity::kMedium;
    }
    if (result.confidence) {
      f.tool_confidence = *result.confidence;
    } else if (rule != nullptr && rule->confidence) {
      f.tool_confidence = *rule->confidence;
    }
    f.context.flagged_line_number = f.location.start_line;
    f.context.window_start_line = f.location.start_line;
    f.context.window_end_line = f.location.start_line;
    findings.push_back(std::move(f));
  }
  std::stable_sort(findings.begin(), findings.end(),
                   [](const Finding& a, const Finding& b) {
                     return std::tie(a.location.file_uri, a.location.start_line,
                                     a.rule_id) <
                            std::tie(b.location.file_uri, b.location.start_line,
                                     b.rule_id);
                   });
  return findings;
}

CodeLocation RelativizeLocation(const CodeLocation& loc,
                                const fs::path& source_root) {
  if (!loc.external) return loc;
  std::string path = loc.file_uri;
  if (path.rfind("file://", 0) == 0) {
    path.erase(0, 7);
    if (path.rfind("localhost/", 0) == 0) path.erase(0, 9);
  } else if (path.empty() || path[0] != '/') {
    return loc;
  }
  std::error_code ec;
  const fs::path root = fs::weakly_canonical(source_root, ec);
  if (ec) return loc;
  const fs::path rel = fs::path(path).lexically_normal().lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") return loc;
  CodeLocation out = loc;
  out.file_uri = rel.generic_string();
  out.external = false;
  return out;
}

std::vector<Finding> BuildFindings(const SarifDocument& doc,
                                   const fs::path& source_root,
                                   const Catalogs& catalogs,
                                   const ImportOptions& options) {
  std::unordered_map<std::string, std::optional<std::string>> files;
  auto text_for = [&](const CodeLocation& loc) -> const std::optional<std::string>& {
    auto it = files.find(loc.file_uri);
    if (it == files.end()) {
      it = files.emplace(loc.file_uri, ReadSourceFile(source_root, loc)).first;
    }
    return it->second;
  };

  std::vector<Finding> findings = NormalizeFindings(doc);
  for (auto& f : findings) {
    f.location = RelativizeLocation(f.location, source_root);
    if (const auto& text = text_for(f.location)) {
      f.context = ExtractContextFromText(*text, f.location.start_line,
                                         options.extraction);
    } else {
      f.context = ExtractContext(source_root, f.location, options.extraction);
    }
    if (f.data_flow) {
      auto fill = [&](FlowStep& step) {
        step.location = RelativizeLocation(step.location, source_root);
        if (const auto& text = text_for(step.location)) {
          step.snippet = LineOf(*text, step.location.start_line).value_or("");
        }
      };
      fill(f.data_flow->source);
      for (auto& step : f.data_flow->intermediates) fill(step);
      fill(f.data_flow->sink);
    }
    f = Annotate(std::move(f), catalogs);
  }
  return findings;
}

}  // namespace vulnexp
