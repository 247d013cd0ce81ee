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

#include "vulnexp/workbench.h"

#include <map>

#include "vulnexp/sarif.h"

namespace vulnexp {

using nlohmann::json;

void to_json(json& j, const ScanRecord& r) {
  j = json{{"scan_id", r.scan_id},
           {"sarif_path", r.sarif_path},
           {"source_root", r.source_root},
           {"imported_at", FormatIsoUtc(r.imported_at)},
           {"finding_count", r.finding_count},
           {"fingerprints", r.fingerprints}};
}

void from_json(const json& j, ScanRecord& r) {
  j.at("scan_id").get_to(r.scan_id);
  j.at("sarif_path").get_to(r.sarif_path);
  j.at("source_root").get_to(r.source_root);
  auto t = ParseIsoUtc(j.at("imported_at").get<std::string>());
  if (!t) throw std::invalid_argument("bad imported_at");
  r.imported_at = *t;
  j.at("finding_count").get_to(r.finding_count);
  j.at("fingerprints").get_to(r.fingerprints);
}

std::optional<GroupBy> ParseGroupBy(std::string_view text) {
  if (text.empty() || text == "rule") return GroupBy::kRule;
  if (text == "file") return GroupBy::kFile;
  return std::nullopt;
}

json FindingSummary(const Finding& f) {
  return json{{"fingerprint", f.fingerprint},
              {"rule_id", f.rule_id},
              {"rule_name", f.rule_name},
              {"message", f.message},
              {"severity", SeverityName(f.severity)},
              {"location", f.location}};
}

Workbench::Workbench(Store& store, Catalogs catalogs,
                     std::shared_ptr<const LlmGateway> gateway,
                     ExplanationServiceConfig explanation_config, Clock clock)
    : store_(store),
      catalogs_(std::move(catalogs)),
      service_(store, std::move(gateway), std::move(explanation_config), clock),
      clock_(std::move(clock)) {}

ScanRecord Workbench::ImportScan(std::string_view sarif_text, std::string sarif_name,
                                 const std::filesystem::path& source_root,
                                 const ImportOptions& options) {
  SarifDocument doc = ParseSarif(sarif_text);
  std::vector<Finding> findings = BuildFindings(doc, source_root, catalogs_, options);

  std::lock_guard lock(import_mu_);
  ScanRecord record;
  record.scan_id = "scan-" + std::to_string(store_.Count(Namespace::kScans) + 1);
  record.sarif_path = std::move(sarif_name);
  record.source_root = source_root.string();
  record.imported_at = std::chrono::floor<std::chrono::seconds>(clock_());
  record.finding_count = findings.size();
  for (const Finding& f : findings) {
    store_.Put(Namespace::kFindings, f.fingerprint, f);
    record.fingerprints.push_back(f.fingerprint);
  }
  store_.Put(Namespace::kScans, record.scan_id, record);
  return record;
}

std::optional<ScanRecord> Workbench::GetScan(std::string_view scan_id) const {
  auto j = store_.Get(Namespace::kScans, scan_id);
  if (!j) return std::nullopt;
  return j->get<ScanRecord>();
}

std::vector<ScanRecord> Workbench::ListScans() const {
  std::vector<ScanRecord> out;
  for (const auto& [key, value] : store_.List(Namespace::kScans)) {
    out.push_back(value.get<ScanRecord>());
  }
  return out;
}

std::vector<Finding> Workbench::ScanFindings(std::string_view scan_id) const {
  auto scan = GetScan(scan_id);
  if (!scan) throw NotFoundError("unknown scan " + std::string(scan_id));
  std::vector<Finding> out;
  for (const std::string& fp : scan->fingerprints) {
    if (auto f = GetFinding(fp)) out.push_back(*std::move(f));
  }
  return out;
}

json Workbench::GroupedFindings(std::string_view scan_id, GroupBy group) const {
  std::vector<Finding> findings = ScanFindings(scan_id);
  std::map<std::string, json> branches;
  for (const Finding& f : findings) {
    const std::string& key = group == GroupBy::kRule ? f.rule_id : f.location.file_uri;
    json& branch = branches[key];
    if (branch.is_null()) {
      branch = {{"key", key},
                {"label", group == GroupBy::kRule && !f.rule_name.empty() ? f.rule_name : key},
                {"count", 0},
                {"findings", json::array()}};
    }
    branch["findings"].push_back(FindingSummary(f));
    branch["count"] = branch["findings"].size();
  }
  json groups = json::array();
  for (auto& [key, branch] : branches) groups.push_back(std::move(branch));
  return json{{"scan_id", scan_id},
              {"group", group == GroupBy::kRule ? "rule" : "file"},
              {"finding_count", findings.size()},
              {"groups", std::move(groups)}};
}

std::optional<Finding> Workbench::GetFinding(std::string_view fingerprint) const {
  auto j = store_.Get(Namespace::kFindings, fingerprint);
  if (!j) return std::nullopt;
  return j->get<Finding>();
}

ExplainResult Workbench::Explain(std::string_view fingerprint, ExperienceLevel level,
                                 const ExplainOptions& options) {
  auto finding = GetFinding(fingerprint);
  if (!finding) throw NotFoundError("unknown finding " + std::string(fingerprint));
  return service_.Explain(*finding, level, options);
}

std::string Workbench::RecordFeedback(Feedback feedback) {
  if (!GetFinding(feedback.finding_fingerprint)) {
    throw NotFoundError("unknown finding " + feedback.finding_fingerprint);
  }
  return service_.RecordFeedback(std::move(feedback));
}

}  // namespace vulnexp
