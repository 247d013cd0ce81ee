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

#include "vulnexp/catalog.h"

#include <cctype>
#include <regex>
#include <set>

#include "vulnexp/assets.h"
#include "vulnexp/lexer.h"
#include "vulnexp/util.h"

namespace vulnexp {

namespace {

using nlohmann::json;

struct KeywordRule {
  std::string_view keyword;
  std::string_view cwe_id;
};

// Covers the eleven OWASP Benchmark categories.
constexpr KeywordRule kRuleKeywords[] = {
    {"xss", "CWE-79"},           {"cross-site", "CWE-79"},
    {"sqli", "CWE-89"},          {"sql-injection", "CWE-89"},
    {"path-traversal", "CWE-22"}, {"pathtraversal", "CWE-22"},
    {"cmdi", "CWE-78"},          {"command", "CWE-78"},
    {"crypto", "CWE-327"},       {"hash", "CWE-328"},
    {"cookie", "CWE-614"},       {"trustbound", "CWE-501"},
    {"ldap", "CWE-90"},          {"xpath", "CWE-643"},
    {"random", "CWE-330"},       {"weakrand", "CWE-330"},
};

int LineOfOffset(std::string_view text, size_t offset) {
  int line = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Line on which each element of a top-level JSON array starts.
std::vector<int> ElementStartLines(std::string_view text) {
  std::vector<int> lines;
  int line = 1;
  int depth = 0;
  bool in_string = false;
  bool expect_element = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (depth == 1 && expect_element && !std::isspace(static_cast<unsigned char>(c))) {
      lines.push_back(line);
      expect_element = false;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      if (++depth == 1 && c == '[') expect_element = true;
    } else if (c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 1) {
      expect_element = true;
    }
  }
  return lines;
}

json ParseArray(std::string_view text, std::string_view source_name) {
  if (Trim(text).empty()) return json::array();
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = LineOfOffset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw CatalogError(CatalogError::Kind::kParse,
                       std::string(source_name) + ":" + std::to_string(line) +
                           ": invalid JSON",
                       line);
  }
  if (!root.is_array()) {
    throw CatalogError(CatalogError::Kind::kParse,
                       std::string(source_name) +
                           ":1: catalog must be a JSON array",
                       1);
  }
  return root;
}

class FieldReader {
 public:
  FieldReader(std::string_view source, const json& entry, int line)
      : source_(source), entry_(entry), line_(line) {
    if (!entry.is_object()) Fail("", "entry is not an object");
  }

  std::string RequiredString(std::string_view field) const {
    auto it = entry_.find(field);
    if (it == entry_.end() || !it->is_string()) {
      Fail(field, "missing or non-string field");
    }
    return it->get<std::string>();
  }

  std::string OptionalString(std::string_view field) const {
    auto it = entry_.find(field);
    if (it == entry_.end() || it->is_null()) return {};
    if (!it->is_string()) Fail(field, "field must be a string");
    return it->get<std::string>();
  }

  std::optional<int> OptionalInt(std::string_view field) const {
    auto it = entry_.find(field);
    if (it == entry_.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) Fail(field, "field must be an integer");
    return it->get<int>();
  }

  [[noreturn]] void Fail(std::string_view field, std::string_view why) const {
    std::string msg = std::string(source_) + ":" + std::to_string(line_) + ": ";
    if (!field.empty()) msg += "field '" + std::string(field) + "': ";
    msg += why;
    throw CatalogError(CatalogError::Kind::kParse, msg, line_,
                       std::string(field));
  }

 private:
  std::string_view source_;
  const json& entry_;
  int line_;
};

}  // namespace

Catalogs::Catalogs(std::vector<CweEntry> cwes,
                   std::vector<CriticalMethod> methods)
    : cwes_(std::move(cwes)), methods_(std::move(methods)) {
  for (size_t i = 0; i < cwes_.size(); ++i) {
    if (!cwe_index_.emplace(cwes_[i].cwe_id, i).second) {
      throw CatalogError(CatalogError::Kind::kDuplicateEntry,
                         "duplicate CWE entry " + cwes_[i].cwe_id, 0, "cwe_id");
    }
  }
  for (size_t i = 0; i < methods_.size(); ++i) {
    if (!method_index_.emplace(methods_[i].qualified_name, i).second) {
      throw CatalogError(CatalogError::Kind::kDuplicateEntry,
                         "duplicate critical method " +
                             methods_[i].qualified_name,
                         0, "qualified_name");
    }
  }
}

const CweEntry* Catalogs::FindCwe(std::string_view cwe_id) const {
  auto it = cwe_index_.find(cwe_id);
  return it == cwe_index_.end() ? nullptr : &cwes_[it->second];
}

const CriticalMethod* Catalogs::FindMethod(
    std::string_view qualified_name) const {
  auto it = method_index_.find(qualified_name);
  return it == method_index_.end() ? nullptr : &methods_[it->second];
}

std::vector<CweEntry> ParseCweCatalog(std::string_view text,
                                      std::string_view source_name) {
  static const std::regex kId(R"(CWE-[1-9][0-9]*)");
  const json root = ParseArray(text, source_name);
  const auto lines = ElementStartLines(text);
  std::vector<CweEntry> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < root.size(); ++i) {
    const int line = i < lines.size() ? lines[i] : 0;
    FieldReader reader(source_name, root[i], line);
    CweEntry e;
    e.cwe_id = reader.RequiredString("cwe_id");
    if (!std::regex_match(e.cwe_id, kId)) {
      reader.Fail("cwe_id", "expected CWE-<n>, got '" + e.cwe_id + "'");
    }
    e.name = reader.RequiredString("name");
    e.summary = reader.OptionalString("summary");
    e.rank = reader.OptionalInt("rank");
    if (e.rank && (*e.rank < 1 || *e.rank > 25)) {
      reader.Fail("rank", "rank must be within 1..25");
    }
    if (!seen.insert(e.cwe_id).second) {
      throw CatalogError(CatalogError::Kind::kDuplicateEntry,
                         std::string(source_name) + ":" + std::to_string(line) +
                             ": duplicate entry " + e.cwe_id,
                         line, "cwe_id");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CriticalMethod> ParseMethodCatalog(std::string_view text,
                                               std::string_view source_name) {
  const json root = ParseArray(text, source_name);
  const auto lines = ElementStartLines(text);
  std::vector<CriticalMethod> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < root.size(); ++i) {
    const int line = i < lines.size() ? lines[i] : 0;
    FieldReader reader(source_name, root[i], line);
    CriticalMethod m;
    m.qualified_name = reader.RequiredString("qualified_name");
    if (Trim(m.qualified_name).empty()) {
      reader.Fail("qualified_name", "must not be empty");
    }
    const std::string category = reader.RequiredString("category");
    auto parsed = ParseMethodCategory(category);
    if (!parsed) {
      reader.Fail("category", "expected Source, Sink, or Sanitizer");
    }
    m.category = *parsed;
    m.note = reader.OptionalString("note");
    if (!seen.insert(m.qualified_name).second) {
      throw CatalogError(CatalogError::Kind::kDuplicateEntry,
                         std::string(source_name) + ":" + std::to_string(line) +
                             ": duplicate entry " + m.qualified_name,
                         line, "qualified_name");
    }
    out.push_back(std::move(m));
  }
  return out;
}

Catalogs LoadCatalogs(const std::filesystem::path& cwe_file,
                      const std::filesystem::path& methods_file) {
  auto cwe_text = ReadFileBytes(cwe_file);
  if (!cwe_text) {
    throw CatalogError(CatalogError::Kind::kParse,
                       "cannot read CWE catalog " + cwe_file.filename().string());
  }
  auto methods_text = ReadFileBytes(methods_file);
  if (!methods_text) {
    throw CatalogError(CatalogError::Kind::kParse,
                       "cannot read method catalog " +
                           methods_file.filename().string());
  }
  return Catalogs(ParseCweCatalog(*cwe_text, cwe_file.filename().string()),
                  ParseMethodCatalog(*methods_text,
                                     methods_file.filename().string()));
}

const Catalogs& DefaultCatalogs() {
  static const Catalogs kCatalogs(
      ParseCweCatalog(assets::get("catalog/cwe.json"), "cwe.json"),
      ParseMethodCatalog(assets::get("catalog/critical_methods.json"),
                         "critical_methods.json"));
  return kCatalogs;
}

std::optional<std::string> CweFromRuleId(std::string_view rule_id) {
  const std::string lower = ToLower(rule_id);
  for (const auto& rule : kRuleKeywords) {
    if (lower.find(rule.keyword) != std::string::npos) {
      return std::string(rule.cwe_id);
    }
  }
  return std::nullopt;
}

std::optional<std::string> CweFromTags(const std::vector<std::string>& tags) {
  static const std::regex kToken(R"((?:^|[^A-Za-z0-9])CWE-0*([0-9]+))",
                                 std::regex::icase);
  for (const auto& tag : tags) {
    std::smatch m;
    if (std::regex_search(tag, m, kToken)) return "CWE-" + m[1].str();
  }
  return std::nullopt;
}

std::vector<std::string> CallIdentifiers(std::string_view code) {
  const TokenStream ts = Tokenize(code);
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < ts.tokens.size(); ++i) {
    if (ts.tokens[i].kind != TokenKind::kIdentifier) continue;
    size_t j = i + 1;
    while (j < ts.tokens.size() && ts.tokens[j].IsTrivia()) ++j;
    if (j < ts.tokens.size() && ts.tokens[j].IsPunct('(') &&
        seen.insert(ts.tokens[i].text).second) {
      out.push_back(ts.tokens[i].text);
    }
  }
  return out;
}

Finding Annotate(Finding finding, const Catalogs& catalogs) {
  std::optional<std::string> cwe_id = CweFromTags(finding.rule_tags);
  if (!cwe_id) cwe_id = CweFromRuleId(finding.rule_id);
  finding.cwe = std::nullopt;
  if (cwe_id) {
    if (const CweEntry* entry = catalogs.FindCwe(*cwe_id)) {
      finding.cwe = *entry;
    } else {
      finding.cwe = CweEntry{*cwe_id, "", "", std::nullopt};
    }
  }

  finding.critical_methods.clear();
  const auto calls = CallIdentifiers(finding.context.enclosing_source);
  const std::set<std::string_view> called(calls.begin(), calls.end());
  for (const auto& method : catalogs.methods()) {
    if (called.count(method.FinalIdentifier()) > 0) {
      finding.critical_methods.push_back(method);
    }
  }
  return finding;
}

}  // namespace vulnexp
