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

#ifndef VULNEXP_OBFUSCATOR_H_
#define VULNEXP_OBFUSCATOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vulnexp/lexer.h"

// Name-based obfuscation: declared classes, methods, and variables are
// renamed consistently across one file. Scope is ignored; a name maps to a
// single fresh name file-wide.
namespace vulnexp {

enum class RenameKind { kClass, kMethod, kVariable };

std::string_view RenameKindName(RenameKind kind);

struct RenameEntry {
  std::string fresh;
  RenameKind kind;

  bool operator==(const RenameEntry&) const = default;
};

struct RenameMap {
  std::map<std::string, RenameEntry> entries;  // original -> fresh
  uint64_t seed = 0;

  bool empty() const { return entries.empty(); }
  // Maps fresh names back to the originals, keeping each entry's kind.
  RenameMap Inverse() const;
  bool IsInjective() const;

  nlohmann::json ToJson() const;
  static RenameMap FromJson(const nlohmann::json& j);

  bool operator==(const RenameMap&) const = default;
};

using IdentifierSet = std::set<std::string, std::less<>>;

// Standard-library and servlet API names shipped in
// data/protected_identifiers.txt. Keywords never need listing; the lexer
// does not produce Identifier tokens for them.
const IdentifierSet& DefaultProtectedIdentifiers();

// Parses the protected-list file format: one identifier per line, '#'
// starts a comment, blank lines ignored.
IdentifierSet ParseProtectedList(std::string_view text);

// Classifies declarations and assigns fresh names:
//   identifier after class/interface/enum/struct/union/record -> Class "C<n>"
//   type-preceded identifier followed by '('                  -> Method "m<n>"
//   type-preceded identifier followed by = ; , ) : [          -> Variable "v<n>"
// Counters are per kind and advance in order of first occurrence in the
// stream. Names in `protected_names`, annotation names, and identifiers in
// import/package/preprocessor lines are never mapped. Fresh names skip any
// identifier already present in the source or the protected set.
//
// `seed` is recorded in the map; the default scheme does not consume it.
RenameMap PlanRenames(const TokenStream& stream, uint64_t seed,
                      const IdentifierSet& protected_names);

// Replaces every Identifier token that is a key of `map`; all other tokens
// are emitted byte-for-byte.
std::string ApplyRenames(const TokenStream& stream, const RenameMap& map);

struct ObfuscatedSource {
  std::string text;
  RenameMap map;
};

ObfuscatedSource ObfuscateSource(std::string_view source,
                                 const IdentifierSet& protected_names,
                                 uint64_t seed = 0);

// True for file extensions the lexer handles.
bool IsObfuscatableFile(const std::filesystem::path& path);

struct DirectoryObfuscationReport {
  size_t files_obfuscated = 0;
  size_t files_copied = 0;
  // Relative path (forward slashes) -> map.
  std::map<std::string, RenameMap> maps;
};

// Mirrors `input_dir` into `output_dir`. Source files are obfuscated, other
// files copied verbatim, and all rename maps are written to
// `<output_dir>/rename_maps.json`.
DirectoryObfuscationReport ObfuscateDirectory(
    const std::filesystem::path& input_dir,
    const std::filesystem::path& output_dir,
    const IdentifierSet& protected_names, uint64_t seed = 0);

}  // namespace vulnexp

#endif  // VULNEXP_OBFUSCATOR_H_
