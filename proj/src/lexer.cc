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

#include "vulnexp/lexer.h"

#include <algorithm>
#include <iterator>
#include <cctype>

namespace vulnexp {

namespace {

constexpr std::string_view kKeywords[] = {
    "abstract", "alignas",   "alignof",  "assert",    "auto",
    "bool",     "boolean",   "break",    "byte",      "case",
    "catch",    "char",      "class",    "const",     "constexpr",
    "continue", "decltype",  "default",  "delete",    "do",
    "double",   "else",      "enum",     "explicit",  "export",
    "extends",  "extern",    "false",    "final",     "finally",
    "float",    "for",       "friend",   "goto",      "if",
    "implements", "import",  "inline",   "instanceof", "int",
    "interface", "long",     "module",   "mutable",   "namespace",
    "native",   "new",       "noexcept", "null",
    "nullptr",  "operator",  "package",  "permits",   "private",
    "protected", "public",   "record",   "register",  "restrict",
    "return",   "sealed",    "short",    "signed",    "sizeof",
    "static",   "static_assert", "static_cast", "strictfp", "struct",
    "super",    "switch",    "synchronized", "template", "this",
    "throw",    "throws",    "transient", "true",     "try",
    "typedef",  "typename",  "union",    "unsigned",  "using",
    "var",      "virtual",   "void",     "volatile",  "while",
    "yield",    "const_cast", "dynamic_cast", "reinterpret_cast",
    "thread_local",
};

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool IsIdentChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream Run() {
    TokenStream out;
    while (pos_ < src_.size()) {
      out.tokens.push_back(Next());
    }
    return out;
  }

 private:
  char Peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  Token Make(TokenKind kind, size_t start, bool unterminated = false) {
    return Token{kind, std::string(src_.substr(start, pos_ - start)), start,
                 unterminated};
  }

  Token Next() {
    const size_t start = pos_;
    const auto c = static_cast<unsigned char>(src_[pos_]);
    if (std::isspace(c)) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      return Make(TokenKind::kWhitespace, start);
    }
    if (c == '/' && Peek(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return Make(TokenKind::kComment, start);
    }
    if (c == '/' && Peek(1) == '*') {
      const size_t close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) {
        pos_ = src_.size();
        return Make(TokenKind::kComment, start, true);
      }
      pos_ = close + 2;
      return Make(TokenKind::kComment, start);
    }
    if (c == '"' && Peek(1) == '"' && Peek(2) == '"') {
      return TextBlock(start);
    }
    if (c == '"' || c == '\'') {
      return Quoted(start, static_cast<char>(c));
    }
    if (std::isdigit(c) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(Peek(1))))) {
      return Number(start);
    }
    if (IsIdentStart(c)) {
      while (pos_ < src_.size() &&
             IsIdentChar(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      const std::string_view word = src_.substr(start, pos_ - start);
      return Make(IsKeyword(word) ? TokenKind::kKeyword : TokenKind::kIdentifier,
                  start);
    }
    ++pos_;
    return Make(TokenKind::kPunct, start);
  }

  Token Quoted(size_t start, char quote) {
    ++pos_;
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (ch == '\\') {
        pos_ = std::min(pos_ + 2, src_.size());
        continue;
      }
      ++pos_;
      if (ch == quote) {
        return Make(quote == '"' ? TokenKind::kStringLiteral
                                 : TokenKind::kCharLiteral,
                    start);
      }
      // Plain literals cannot span lines; stop before the newline so the
      // rest of the file still lexes.
      if (ch == '\n') {
        --pos_;
        break;
      }
    }
    return Make(quote == '"' ? TokenKind::kStringLiteral
                             : TokenKind::kCharLiteral,
                start, true);
  }

  Token TextBlock(size_t start) {
    pos_ += 3;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '\\') {
        pos_ = std::min(pos_ + 2, src_.size());
        continue;
      }
      if (src_.compare(pos_, 3, "\"\"\"") == 0) {
        pos_ += 3;
        return Make(TokenKind::kStringLiteral, start);
      }
      ++pos_;
    }
    return Make(TokenKind::kStringLiteral, start, true);
  }

  Token Number(size_t start) {
    while (pos_ < src_.size()) {
      const auto ch = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(ch) || ch == '_' || ch == '.') {
        ++pos_;
      } else if ((ch == '+' || ch == '-') && pos_ > start) {
        const char prev = static_cast<char>(std::tolower(src_[pos_ - 1]));
        const bool hex = src_.size() > start + 1 &&
                         (src_[start + 1] == 'x' || src_[start + 1] == 'X');
        if ((prev == 'e' && !hex) || prev == 'p') {
          ++pos_;
        } else {
          break;
        }
      } else {
        break;
      }
    }
    return Make(TokenKind::kNumberLiteral, start);
  }

  std::string_view src_;
  size_t pos_ = 0;
};

}  // namespace

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "Identifier";
    case TokenKind::kKeyword: return "Keyword";
    case TokenKind::kStringLiteral: return "StringLiteral";
    case TokenKind::kCharLiteral: return "CharLiteral";
    case TokenKind::kComment: return "Comment";
    case TokenKind::kNumberLiteral: return "NumberLiteral";
    case TokenKind::kPunct: return "Punct";
    case TokenKind::kWhitespace: return "Whitespace";
  }
  return "Unknown";
}

bool IsKeyword(std::string_view word) {
  return std::find(std::begin(kKeywords), std::end(kKeywords), word) !=
         std::end(kKeywords);
}

std::string TokenStream::Concat() const {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

std::vector<TokenKind> TokenStream::Kinds() const {
  std::vector<TokenKind> kinds;
  kinds.reserve(tokens.size());
  for (const auto& t : tokens) kinds.push_back(t.kind);
  return kinds;
}

bool TokenStream::HasUnterminated() const {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return t.unterminated; });
}

TokenStream Tokenize(std::string_view source) { return Lexer(source).Run(); }

}  // namespace vulnexp
