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

#ifndef VULNEXP_CATALOG_H_
#define VULNEXP_CATALOG_H_

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vulnexp/finding.h"

namespace vulnexp {

class CatalogError : public std::runtime_error {
 public:
  enum class Kind { kParse, kDuplicateEntry };

  CatalogError(Kind kind, const std::string& what, int line = 0,
               std::string field = {})
      : std::runtime_error(what),
        kind_(kind),
        line_(line),
        field_(std::move(field)) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }  // 0 when unknown
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  int line_;
  std::string field_;
};

// Security catalogs: CWE weaknesses and security-relevant library methods.
// Immutable after construction.
class Catalogs {
 public:
  Catalogs() = default;
  // Throws CatalogError(kDuplicateEntry) on a repeated cwe_id or
  // qualified_name.
  Catalogs(std::vector<CweEntry> cwes, std::vector<CriticalMethod> methods);

  const std::vector<CweEntry>& cwes() const { return cwes_; }
  const std::vector<CriticalMethod>& methods() const { return methods_; }

  const CweEntry* FindCwe(std::string_view cwe_id) const;
  const CriticalMethod* FindMethod(std::string_view qualified_name) const;

 private:
  std::vector<CweEntry> cwes_;
  std::vector<CriticalMethod> methods_;
  std::map<std::string, size_t, std::less<>> cwe_index_;
  std::map<std::string, size_t, std::less<>> method_index_;
};

// Both catalog files are JSON arrays of objects. `source_name` prefixes
// diagnostics. Throws CatalogError.
std::vector<CweEntry> ParseCweCatalog(std::string_view text,
                                      std::string_view source_name = "cwe");
std::vector<CriticalMethod> ParseMethodCatalog(
    std::string_view text, std::string_view source_name = "methods");

// An empty or whitespace-only file is an empty catalog.
Catalogs LoadCatalogs(const std::filesystem::path& cwe_file,
                      const std::filesystem::path& methods_file);

// The catalogs shipped in data/catalog, compiled into the library.
const Catalogs& DefaultCatalogs();

// Rule-id keyword lookup, first match in table order; nullopt when no
// keyword occurs in the lowercased rule id.
std::optional<std::string> CweFromRuleId(std::string_view rule_id);

// First "CWE-<n>" token in the tags, normalized to "CWE-<n>".
std::optional<std::string> CweFromTags(const std::vector<std::string>& tags);

// Identifiers that appear as call tokens (followed by '(') in `code`.
std::vector<std::string> CallIdentifiers(std::string_view code);

// Sets `cwe` (tags first, then rule-id keywords) and `critical_methods`
// (catalog methods whose final identifier is called in the enclosing source).
// No other field is touched; repeated application is a no-op.
Finding Annotate(Finding finding, const Catalogs& catalogs);

}  // namespace vulnexp

#endif  // VULNEXP_CATALOG_H_
