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

#include "vulnexp/obfuscator.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vulnexp/assets.h"
#include "vulnexp/util.h"

namespace vulnexp {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kTypeKeywords[] = {
    "boolean", "bool",     "byte",  "char",   "short", "int",
    "long",    "float",    "double", "void",  "var",   "auto",
    "unsigned", "signed",  "const", "string",
};

constexpr std::string_view kTypeDeclKeywords[] = {
    "class", "interface", "enum", "struct", "union", "record",
};

template <size_t N>
bool In(const std::string_view (&table)[N], std::string_view s) {
  return std::find(std::begin(table), std::end(table), s) != std::end(table);
}

// View over the non-trivia tokens of a stream.
class SignificantTokens {
 public:
  explicit SignificantTokens(const TokenStream& stream) : stream_(stream) {
    for (size_t i = 0; i < stream.tokens.size(); ++i) {
      if (!stream.tokens[i].IsTrivia()) index_.push_back(i);
    }
  }

  size_t size() const { return index_.size(); }
  const Token& at(size_t k) const { return stream_.tokens[index_[k]]; }
  const Token* prev(size_t k, size_t back = 1) const {
    return k >= back ? &at(k - back) : nullptr;
  }
  const Token* next(size_t k) const {
    return k + 1 < index_.size() ? &at(k + 1) : nullptr;
  }

  // True when the significant token k is the first non-trivia token on its
  // physical line.
  bool StartsLine(size_t k) const {
    const size_t raw = index_[k];
    for (size_t i = raw; i-- > 0;) {
      const Token& t = stream_.tokens[i];
      if (t.text.find('\n') != std::string::npos) return true;
      if (!t.IsTrivia()) return false;
    }
    return true;
  }

 private:
  const TokenStream& stream_;
  std::vector<size_t> index_;
};

bool IsBoundary(const Token* t) {
  return t == nullptr || t->IsPunct(';') || t->IsPunct('{') ||
         t->IsPunct('}') || t->IsPunct('(') || t->IsPunct(',');
}

// `>` closes a generic argument list such as Map<String, List<Integer>>.
bool ClosesGenericType(const SignificantTokens& sig, size_t k) {
  int depth = 0;
  for (size_t i = k + 1; i-- > 0;) {
    const Token& t = sig.at(i);
    if (t.IsPunct('>')) {
      ++depth;
    } else if (t.IsPunct('<')) {
      if (--depth == 0) {
        const Token* before = sig.prev(i);
        return before != nullptr && before->kind == TokenKind::kIdentifier;
      }
    } else if (!(t.kind == TokenKind::kIdentifier ||
                 t.kind == TokenKind::kKeyword || t.IsPunct(',') ||
                 t.IsPunct('?') || t.IsPunct('.') || t.IsPunct('[') ||
                 t.IsPunct(']'))) {
      return false;
    }
  }
  return false;
}

// Whether significant token k can end a type in a declaration
// (`String`, `int`, `List<T>`, `byte[]`, `String...`, `char *`).
bool EndsType(const SignificantTokens& sig, size_t k) {
  const Token& t = sig.at(k);
  if (t.kind == TokenKind::kIdentifier) return true;
  if (t.kind == TokenKind::kKeyword) return In(kTypeKeywords, t.text);
  if (t.IsPunct('>')) return ClosesGenericType(sig, k);
  if (t.IsPunct(']')) {
    const Token* open = sig.prev(k);
    return open != nullptr && open->IsPunct('[') && k >= 2 &&
           EndsType(sig, k - 2);
  }
  if (t.IsPunct('.')) {
    return k >= 3 && sig.at(k - 1).IsPunct('.') && sig.at(k - 2).IsPunct('.') &&
           EndsType(sig, k - 3);
  }
  if (t.IsPunct('*') || t.IsPunct('&')) {
    const Token* base = sig.prev(k);
    if (base == nullptr) return false;
    if (base->kind == TokenKind::kKeyword) return In(kTypeKeywords, base->text);
    return base->kind == TokenKind::kIdentifier && IsBoundary(sig.prev(k, 2));
  }
  return false;
}

bool IsVariableFollower(const Token* t) {
  return t != nullptr && (t->IsPunct('=') || t->IsPunct(';') ||
                          t->IsPunct(',') || t->IsPunct(')') ||
                          t->IsPunct(':') || t->IsPunct('['));
}

// Names that must survive: imports, package names, annotation names, and
// anything on a preprocessor line.
IdentifierSet ImplicitlyProtected(const SignificantTokens& sig) {
  IdentifierSet out;
  bool in_import = false;
  bool in_directive = false;
  for (size_t k = 0; k < sig.size(); ++k) {
    const Token& t = sig.at(k);
    if (in_directive && sig.StartsLine(k)) in_directive = false;
    if (t.IsPunct('#') && sig.StartsLine(k)) in_directive = true;
    if (t.kind == TokenKind::kKeyword &&
        (t.text == "import" || t.text == "package")) {
      in_import = true;
    }
    if (t.kind == TokenKind::kIdentifier) {
      const Token* p = sig.prev(k);
      if (in_import || in_directive || (p != nullptr && p->IsPunct('@'))) {
        out.insert(t.text);
      }
    }
    if (in_import && t.IsPunct(';')) in_import = false;
  }
  return out;
}

int KindRank(RenameKind kind) {
  switch (kind) {
    case RenameKind::kClass: return 0;
    case RenameKind::kMethod: return 1;
    case RenameKind::kVariable: return 2;
  }
  return 3;
}

std::string_view FreshPrefix(RenameKind kind) {
  switch (kind) {
    case RenameKind::kClass: return "C";
    case RenameKind::kMethod: return "m";
    case RenameKind::kVariable: return "v";
  }
  return "x";
}

RenameKind ParseRenameKind(std::string_view name) {
  if (name == "Class") return RenameKind::kClass;
  if (name == "Method") return RenameKind::kMethod;
  if (name == "Variable") return RenameKind::kVariable;
  throw std::invalid_argument("unknown rename kind: " + std::string(name));
}

}  // namespace

std::string_view RenameKindName(RenameKind kind) {
  switch (kind) {
    case RenameKind::kClass: return "Class";
    case RenameKind::kMethod: return "Method";
    case RenameKind::kVariable: return "Variable";
  }
  return "Unknown";
}

RenameMap RenameMap::Inverse() const {
  RenameMap inv;
  inv.seed = seed;
  for (const auto& [original, entry] : entries) {
    inv.entries.emplace(entry.fresh, RenameEntry{original, entry.kind});
  }
  return inv;
}

bool RenameMap::IsInjective() const {
  std::set<std::string> seen;
  for (const auto& [original, entry] : entries) {
    if (!seen.insert(entry.fresh).second) return false;
  }
  return true;
}

nlohmann::json RenameMap::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [original, entry] : entries) {
    list.push_back({{"original", original},
                    {"fresh", entry.fresh},
                    {"kind", RenameKindName(entry.kind)}});
  }
  return {{"seed", seed}, {"entries", std::move(list)}};
}

RenameMap RenameMap::FromJson(const nlohmann::json& j) {
  RenameMap map;
  map.seed = j.value("seed", uint64_t{0});
  for (const auto& e : j.at("entries")) {
    map.entries.emplace(
        e.at("original").get<std::string>(),
        RenameEntry{e.at("fresh").get<std::string>(),
                    ParseRenameKind(e.at("kind").get<std::string>())});
  }
  return map;
}

IdentifierSet ParseProtectedList(std::string_view text) {
  IdentifierSet out;
  for (const auto& raw : SplitLines(text)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) out.emplace(line);
  }
  return out;
}

const IdentifierSet& DefaultProtectedIdentifiers() {
  static const IdentifierSet kSet =
      ParseProtectedList(assets::get("protected_identifiers.txt"));
  return kSet;
}

RenameMap PlanRenames(const TokenStream& stream, uint64_t seed,
                      const IdentifierSet& protected_names) {
  const SignificantTokens sig(stream);
  const IdentifierSet implicit = ImplicitlyProtected(sig);
  auto is_protected = [&](const std::string& name) {
    return protected_names.count(name) > 0 || implicit.count(name) > 0;
  };

  std::unordered_map<std::string, RenameKind> declared;
  auto declare = [&](const std::string& name, RenameKind kind) {
    auto [it, inserted] = declared.emplace(name, kind);
    if (!inserted && KindRank(kind) < KindRank(it->second)) it->second = kind;
  };

  for (size_t k = 0; k < sig.size(); ++k) {
    const Token& t = sig.at(k);
    if (t.kind != TokenKind::kIdentifier || is_protected(t.text)) continue;
    const Token* p = sig.prev(k);
    if (p == nullptr) continue;
    if (p->kind == TokenKind::kKeyword && In(kTypeDeclKeywords, p->text)) {
      declare(t.text, RenameKind::kClass);
      continue;
    }
    if (!EndsType(sig, k - 1)) continue;
    const Token* n = sig.next(k);
    if (n != nullptr && n->IsPunct('(')) {
      declare(t.text, RenameKind::kMethod);
    } else if (IsVariableFollower(n)) {
      declare(t.text, RenameKind::kVariable);
    }
  }

  IdentifierSet taken(protected_names.begin(), protected_names.end());
  for (const auto& tok : stream.tokens) {
    if (tok.kind == TokenKind::kIdentifier || tok.kind == TokenKind::kKeyword) {
      taken.insert(tok.text);
    }
  }

  RenameMap map;
  map.seed = seed;
  size_t counters[3] = {0, 0, 0};
  for (const auto& tok : stream.tokens) {
    if (tok.kind != TokenKind::kIdentifier) continue;
    auto it = declared.find(tok.text);
    if (it == declared.end() || map.entries.count(tok.text) > 0) continue;
    const RenameKind kind = it->second;
    size_t& n = counters[KindRank(kind)];
    std::string fresh;
    do {
      fresh = std::string(FreshPrefix(kind)) + std::to_string(n++);
    } while (taken.count(fresh) > 0);
    taken.insert(fresh);
    map.entries.emplace(tok.text, RenameEntry{std::move(fresh), kind});
  }
  return map;
}

std::string ApplyRenames(const TokenStream& stream, const RenameMap& map) {
  std::string out;
  for (const auto& tok : stream.tokens) {
    if (tok.kind == TokenKind::kIdentifier) {
      if (auto it = map.entries.find(tok.text); it != map.entries.end()) {
        out += it->second.fresh;
        continue;
      }
    }
    out += tok.text;
  }
  return out;
}

ObfuscatedSource ObfuscateSource(std::string_view source,
                                 const IdentifierSet& protected_names,
                                 uint64_t seed) {
  const TokenStream stream = Tokenize(source);
  RenameMap map = PlanRenames(stream, seed, protected_names);
  std::string text = ApplyRenames(stream, map);
  return {std::move(text), std::move(map)};
}

bool IsObfuscatableFile(const fs::path& path) {
  static constexpr std::string_view kExts[] = {
      ".java", ".c", ".h", ".cc", ".cpp", ".cxx", ".hpp", ".hh",
      ".cs",   ".js", ".ts", ".kt", ".scala", ".go",
  };
  const std::string ext = ToLower(path.extension().string());
  return In(kExts, ext);
}

DirectoryObfuscationReport ObfuscateDirectory(
    const fs::path& input_dir, const fs::path& output_dir,
    const IdentifierSet& protected_names, uint64_t seed) {
  if (!fs::is_directory(input_dir)) {
    throw std::invalid_argument("input is not a directory: " +
                                input_dir.filename().string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(input_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  DirectoryObfuscationReport report;
  for (const auto& file : files) {
    const fs::path rel = fs::relative(file, input_dir);
    const fs::path dest = output_dir / rel;
    fs::create_directories(dest.parent_path());
    if (!IsObfuscatableFile(file)) {
      fs::copy_file(file, dest, fs::copy_options::overwrite_existing);
      ++report.files_copied;
      continue;
    }
    auto bytes = ReadFileBytes(file);
    if (!bytes) {
      throw std::runtime_error("cannot read " + rel.generic_string());
    }
    ObfuscatedSource result = ObfuscateSource(*bytes, protected_names, seed);
    std::ofstream out(dest, std::ios::binary);
    out << result.text;
    if (!out) throw std::runtime_error("cannot write " + rel.generic_string());
    report.maps.emplace(rel.generic_string(), std::move(result.map));
    ++report.files_obfuscated;
  }

  nlohmann::json maps = nlohmann::json::object();
  for (const auto& [rel, map] : report.maps) maps[rel] = map.ToJson();
  fs::create_directories(output_dir);
  std::ofstream out(output_dir / "rename_maps.json");
  out << maps.dump(2) << '\n';
  return report;
}

}  // namespace vulnexp
