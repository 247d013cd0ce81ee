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

#ifndef VULNEXP_WORKBENCH_H_
#define VULNEXP_WORKBENCH_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vulnexp/catalog.h"
#include "vulnexp/explanation.h"
#include "vulnexp/finding.h"
#include "vulnexp/ingest.h"
#include "vulnexp/store.h"

namespace vulnexp {

struct ScanRecord {
  std::string scan_id;  // "scan-<n>"
  std::string sarif_path;
  std::string source_root;
  TimePoint imported_at;
  size_t finding_count = 0;
  std::vector<std::string> fingerprints;  // in finding order

  bool operator==(const ScanRecord&) const = default;
};

void to_json(nlohmann::json& j, const ScanRecord& r);
void from_json(const nlohmann::json& j, ScanRecord& r);

enum class GroupBy { kRule, kFile };

std::optional<GroupBy> ParseGroupBy(std::string_view text);

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Leaf of the findings tree.
nlohmann::json FindingSummary(const Finding& f);

// The import/browse/explain pipeline over one store. Every HTTP endpoint and
// CLI subcommand is a thin wrapper over these calls. Thread-safe.
class Workbench {
 public:
  Workbench(Store& store, Catalogs catalogs,
            std::shared_ptr<const LlmGateway> gateway,
            ExplanationServiceConfig explanation_config = {},
            Clock clock = SystemClock());

  // Parses, extracts, annotates, and persists. Throws SarifError.
  ScanRecord ImportScan(std::string_view sarif_text, std::string sarif_name,
                        const std::filesystem::path& source_root,
                        const ImportOptions& options = {});

  std::optional<ScanRecord> GetScan(std::string_view scan_id) const;
  std::vector<ScanRecord> ListScans() const;
  // Throws NotFoundError for an unknown scan.
  std::vector<Finding> ScanFindings(std::string_view scan_id) const;
  // {"scan_id", "group", "groups": [{"key", "label", "count", "findings"}]}
  nlohmann::json GroupedFindings(std::string_view scan_id, GroupBy group) const;
  std::optional<Finding> GetFinding(std::string_view fingerprint) const;

  // Throws NotFoundError for an unknown finding, GatewayError otherwise.
  ExplainResult Explain(std::string_view fingerprint, ExperienceLevel level,
                        const ExplainOptions& options = {});
  // Throws NotFoundError for an unknown finding, FeedbackError otherwise.
  std::string RecordFeedback(Feedback feedback);

  ExplanationService& explanations() { return service_; }
  const ExplanationService& explanations() const { return service_; }
  const Catalogs& catalogs() const { return catalogs_; }
  Store& store() { return store_; }

 private:
  Store& store_;
  Catalogs catalogs_;
  ExplanationService service_;
  Clock clock_;
  std::mutex import_mu_;
};

}  // namespace vulnexp

#endif  // VULNEXP_WORKBENCH_H_
