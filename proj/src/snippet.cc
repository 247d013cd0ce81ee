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

#include "vulnexp/snippet.h"

#include <algorithm>
#include <vector>

#include "vulnexp/lexer.h"
#include "vulnexp/util.h"

namespace vulnexp {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kControlKeywords[] = {
    "if",    "for",   "while", "switch",       "catch", "synchronized",
    "else",  "do",    "try",   "finally",      "return", "new",
    "class", "interface", "enum", "struct",    "namespace",
};

struct BracePair {
  size_t open;   // token index
  size_t close;  // token index
};

class LineIndex {
 public:
  explicit LineIndex(std::string_view text) {
    starts_.push_back(0);
    for (size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') starts_.push_back(i + 1);
    }
  }
  // 1-based line containing byte `offset`.
  int LineAt(size_t offset) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    return static_cast<int>(it - starts_.begin());
  }
  size_t StartOf(int line) const { return starts_[static_cast<size_t>(line - 1)]; }

 private:
  std::vector<size_t> starts_;
};

std::string JoinLines(const std::vector<std::string>& lines, int first,
                      int last) {
  std::string out;
  for (int i = first; i <= last; ++i) {
    if (i > first) out += '\n';
    out += lines[static_cast<size_t>(i - 1)];
  }
  return out;
}

// Index of the first significant token of the declaration that owns the
// brace at `open`.
size_t HeaderStart(const TokenStream& ts, size_t open) {
  size_t start = open;
  for (size_t i = open; i-- > 0;) {
    const Token& t = ts.tokens[i];
    if (t.IsTrivia()) continue;
    if (t.IsPunct(';') || t.IsPunct('{') || t.IsPunct('}')) break;
    start = i;
  }
  return start;
}

bool LooksLikeFunctionHeader(const TokenStream& ts, size_t start, size_t open) {
  bool has_paren = false;
  int depth = 0;
  bool first = true;
  const Token* prev = nullptr;
  for (size_t i = start; i < open; ++i) {
    const Token& t = ts.tokens[i];
    if (t.IsTrivia()) continue;
    if (first) {
      first = false;
      if (t.kind == TokenKind::kKeyword &&
          std::find(std::begin(kControlKeywords), std::end(kControlKeywords),
                    t.text) != std::end(kControlKeywords)) {
        return false;
      }
    }
    if (t.IsPunct('(')) {
      has_paren = true;
      ++depth;
    } else if (t.IsPunct(')')) {
      --depth;
    } else if (depth == 0) {
      // Lambdas, anonymous classes, initializers, and class declarations.
      if (t.IsPunct('=') || (t.IsPunct('>') && prev && prev->IsPunct('-'))) {
        return false;
      }
      if (t.kind == TokenKind::kKeyword &&
          (t.text == "new" || t.text == "class" || t.text == "interface" ||
           t.text == "enum" || t.text == "struct" || t.text == "namespace")) {
        return false;
      }
    }
    prev = &t;
  }
  return has_paren;
}

CodeContext LineWindow(const std::vector<std::string>& lines, int flagged,
                       int radius) {
  CodeContext ctx;
  const int n = static_cast<int>(lines.size());
  ctx.mode = ExtractionMode::kLineWindow;
  ctx.flagged_line_number = flagged;
  ctx.flagged_line_text = lines[static_cast<size_t>(flagged - 1)];
  ctx.window_start_line = std::max(1, flagged - radius);
  ctx.window_end_line = std::min(n, flagged + radius);
  ctx.enclosing_source =
      JoinLines(lines, ctx.window_start_line, ctx.window_end_line);
  return ctx;
}

}  // namespace

std::string_view ExtractionModeName(ExtractionMode mode) {
  switch (mode) {
    case ExtractionMode::kSyntaxAware: return "SyntaxAware";
    case ExtractionMode::kLineWindow: return "LineWindow";
    case ExtractionMode::kUnavailable: return "Unavailable";
  }
  return "Unavailable";
}

std::optional<ExtractionMode> ParseExtractionMode(std::string_view text) {
  if (text == "SyntaxAware") return ExtractionMode::kSyntaxAware;
  if (text == "LineWindow") return ExtractionMode::kLineWindow;
  if (text == "Unavailable") return ExtractionMode::kUnavailable;
  return std::nullopt;
}

std::optional<std::string> ReadSourceFile(const fs::path& source_root,
                                          const CodeLocation& location) {
  if (location.external || location.file_uri.empty()) return std::nullopt;
  std::error_code ec;
  const fs::path root = fs::weakly_canonical(source_root, ec);
  if (ec) return std::nullopt;
  const fs::path file = fs::weakly_canonical(root / location.file_uri, ec);
  if (ec) return std::nullopt;
  const auto rel = file.lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") return std::nullopt;
  auto bytes = ReadFileBytes(file);
  if (!bytes) return std::nullopt;
  return SanitizeUtf8(*bytes);
}

std::optional<std::string> LineOf(std::string_view text, int line) {
  const auto lines = SplitLines(text);
  if (line < 1 || line > static_cast<int>(lines.size())) return std::nullopt;
  return std::string(Trim(lines[static_cast<size_t>(line - 1)]));
}

bool BracesBalanced(std::string_view code) {
  int depth = 0;
  for (const auto& t : Tokenize(code).tokens) {
    if (t.IsPunct('{')) ++depth;
    if (t.IsPunct('}') && --depth < 0) return false;
  }
  return depth == 0;
}

CodeContext ExtractContextFromText(std::string_view text, int flagged_line,
                                   const ExtractionOptions& options) {
  const auto lines = SplitLines(text);
  const int n = static_cast<int>(lines.size());
  if (flagged_line < 1 || flagged_line > n) {
    CodeContext ctx;
    ctx.flagged_line_number = std::max(1, flagged_line);
    ctx.window_start_line = ctx.window_end_line = ctx.flagged_line_number;
    return ctx;
  }

  const TokenStream ts = Tokenize(text);
  const LineIndex index(text);

  std::vector<BracePair> pairs;
  std::vector<size_t> stack;
  for (size_t i = 0; i < ts.tokens.size(); ++i) {
    if (ts.tokens[i].IsPunct('{')) {
      stack.push_back(i);
    } else if (ts.tokens[i].IsPunct('}') && !stack.empty()) {
      pairs.push_back({stack.back(), i});
      stack.pop_back();
    }
  }

  std::optional<BracePair> best;
  int best_header_line = 0;
  for (const auto& pair : pairs) {
    const size_t header = HeaderStart(ts, pair.open);
    const int header_line = index.LineAt(ts.tokens[header].offset);
    const int close_line = index.LineAt(ts.tokens[pair.close].offset);
    if (header_line > flagged_line || close_line < flagged_line) continue;
    if (!LooksLikeFunctionHeader(ts, header, pair.open)) continue;
    if (!best || header_line > best_header_line ||
        (header_line == best_header_line && pair.close < best->close)) {
      best = pair;
      best_header_line = header_line;
    }
  }

  if (!best) return LineWindow(lines, flagged_line, options.window_lines);

  const int close_line = index.LineAt(ts.tokens[best->close].offset);
  const int span = close_line - best_header_line + 1;
  if (span > options.max_lines) {
    CodeContext ctx;
    ctx.mode = ExtractionMode::kLineWindow;
    ctx.truncated = true;
    ctx.flagged_line_number = flagged_line;
    ctx.flagged_line_text = lines[static_cast<size_t>(flagged_line - 1)];
    int start = flagged_line - options.max_lines / 2;
    start = std::clamp(start, best_header_line,
                       close_line - options.max_lines + 1);
    ctx.window_start_line = start;
    ctx.window_end_line = start + options.max_lines - 1;
    ctx.enclosing_source =
        JoinLines(lines, ctx.window_start_line, ctx.window_end_line);
    return ctx;
  }

  CodeContext ctx;
  ctx.mode = ExtractionMode::kSyntaxAware;
  ctx.flagged_line_number = flagged_line;
  ctx.flagged_line_text = lines[static_cast<size_t>(flagged_line - 1)];
  ctx.window_start_line = best_header_line;
  ctx.window_end_line = close_line;
  ctx.enclosing_source = JoinLines(lines, best_header_line, close_line);
  if (!BracesBalanced(ctx.enclosing_source)) {
    // Header or closing line shares text with a neighbouring block; keep the
    // line-aligned start but cut right after the closing brace.
    const size_t begin = index.StartOf(best_header_line);
    const size_t end = ts.tokens[best->close].offset + 1;
    std::string exact(text.substr(begin, end - begin));
    if (BracesBalanced(exact) &&
        exact.find(ctx.flagged_line_text) != std::string::npos) {
      ctx.enclosing_source = std::move(exact);
    } else {
      return LineWindow(lines, flagged_line, options.window_lines);
    }
  }
  return ctx;
}

CodeContext ExtractContext(const fs::path& source_root,
                           const CodeLocation& location,
                           const ExtractionOptions& options) {
  auto text = ReadSourceFile(source_root, location);
  if (!text) {
    CodeContext ctx;
    ctx.flagged_line_number = location.start_line;
    ctx.window_start_line = ctx.window_end_line = location.start_line;
    return ctx;
  }
  return ExtractContextFromText(*text, location.start_line, options);
}

void to_json(nlohmann::json& j, const CodeContext& ctx) {
  j = {{"enclosing_source", ctx.enclosing_source},
       {"flagged_line_text", ctx.flagged_line_text},
       {"flagged_line_number", ctx.flagged_line_number},
       {"window_start_line", ctx.window_start_line},
       {"window_end_line", ctx.window_end_line},
       {"extraction_mode", ExtractionModeName(ctx.mode)},
       {"truncated", ctx.truncated}};
}

void from_json(const nlohmann::json& j, CodeContext& ctx) {
  ctx.enclosing_source = j.at("enclosing_source").get<std::string>();
  ctx.flagged_line_text = j.at("flagged_line_text").get<std::string>();
  ctx.flagged_line_number = j.at("flagged_line_number").get<int>();
  ctx.window_start_line = j.at("window_start_line").get<int>();
  ctx.window_end_line = j.at("window_end_line").get<int>();
  ctx.mode = ParseExtractionMode(j.at("extraction_mode").get<std::string>())
                 .value_or(ExtractionMode::kUnavailable);
  ctx.truncated = j.value("truncated", false);
}

}  // namespace vulnexp
