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

#ifndef VULNEXP_INGEST_H_
#define VULNEXP_INGEST_H_

#include <filesystem>
#include <vector>

#include "vulnexp/catalog.h"
#include "vulnexp/finding.h"
#include "vulnexp/sarif.h"
#include "vulnexp/snippet.h"

namespace vulnexp {

// One Finding per result, ordered by (file_uri, start_line, rule_id) with
// document order breaking ties. Severity comes from the result level, then
// the rule's default level, then Medium. Code context is left empty.
std::vector<Finding> NormalizeFindings(const SarifDocument& doc);

// Rewrites an absolute or file:// location that lies under `source_root`
// into a root-relative one. Other locations are returned unchanged.
CodeLocation RelativizeLocation(const CodeLocation& loc,
                                const std::filesystem::path& source_root);

struct ImportOptions {
  ExtractionOptions extraction;
};

// Full import pipeline: normalize, resolve locations against the source
// root, extract code context and data-flow snippets, annotate.
std::vector<Finding> BuildFindings(const SarifDocument& doc,
                                   const std::filesystem::path& source_root,
                                   const Catalogs& catalogs,
                                   const ImportOptions& options = {});

}  // namespace vulnexp

#endif  // VULNEXP_INGEST_H_
