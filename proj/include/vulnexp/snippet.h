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

#ifndef VULNEXP_SNIPPET_H_
#define VULNEXP_SNIPPET_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "vulnexp/sarif.h"

namespace vulnexp {

enum class ExtractionMode { kSyntaxAware, kLineWindow, kUnavailable };

std::string_view ExtractionModeName(ExtractionMode mode);
std::optional<ExtractionMode> ParseExtractionMode(std::string_view text);

// Source context around a flagged line. Line numbers are 1-based and
// window_start_line <= flagged_line_number <= window_end_line always holds.
struct CodeContext {
  std::string enclosing_source;
  std::string flagged_line_text;
  int flagged_line_number = 1;
  int window_start_line = 1;
  int window_end_line = 1;
  ExtractionMode mode = ExtractionMode::kUnavailable;
  // The enclosing method was longer than ExtractionOptions::max_lines.
  bool truncated = false;

  bool operator==(const CodeContext&) const = default;
};

struct ExtractionOptions {
  int window_lines = 15;  // each side of the flagged line in LineWindow mode
  int max_lines = 200;
};

// Reads `location` relative to `source_root`. Paths that resolve outside the
// root, external URIs, and unreadable files yield nullopt. Invalid UTF-8 is
// replaced with U+FFFD.
std::optional<std::string> ReadSourceFile(const std::filesystem::path& source_root,
                                          const CodeLocation& location);

// Innermost brace block whose header looks like a method or function
// declaration and that contains `flagged_line`; otherwise a +/- window of
// lines clamped to the file.
CodeContext ExtractContextFromText(std::string_view text, int flagged_line,
                                   const ExtractionOptions& options = {});

CodeContext ExtractContext(const std::filesystem::path& source_root,
                           const CodeLocation& location,
                           const ExtractionOptions& options = {});

// Trimmed text of one line, or nullopt when the line is out of range.
std::optional<std::string> LineOf(std::string_view text, int line);

// '{' and '}' counts match outside literals and comments, and no prefix
// closes more than it opens.
bool BracesBalanced(std::string_view code);

void to_json(nlohmann::json& j, const CodeContext& ctx);
void from_json(const nlohmann::json& j, CodeContext& ctx);

}  // namespace vulnexp

#endif  // VULNEXP_SNIPPET_H_
