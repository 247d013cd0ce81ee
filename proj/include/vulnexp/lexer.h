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

#ifndef VULNEXP_LEXER_H_
#define VULNEXP_LEXER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vulnexp {

enum class TokenKind {
  kIdentifier,
  kKeyword,
  kStringLiteral,
  kCharLiteral,
  kComment,
  kNumberLiteral,
  kPunct,
  kWhitespace,
};

std::string_view TokenKindName(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  size_t offset = 0;  // byte offset into the tokenized source
  // Set on a string/char literal or block comment that ran to end of input.
  bool unterminated = false;

  bool IsPunct(char c) const {
    return kind == TokenKind::kPunct && text.size() == 1 && text[0] == c;
  }
  bool IsTrivia() const {
    return kind == TokenKind::kWhitespace || kind == TokenKind::kComment;
  }
};

// Lossless token sequence: concatenating every token's text yields the
// original input bytes.
struct TokenStream {
  std::vector<Token> tokens;

  std::string Concat() const;
  std::vector<TokenKind> Kinds() const;
  bool HasUnterminated() const;
};

// C-family lexer (Java, C, C++, C#, JavaScript). String, char, and text-block
// literals and comments are single tokens; punctuation is one character per
// token. Never fails: an unterminated literal or comment consumes the rest of
// the input and is flagged.
TokenStream Tokenize(std::string_view source);

// Union of Java and C/C++ reserved words plus literal keywords
// (true/false/null).
bool IsKeyword(std::string_view word);

}  // namespace vulnexp

#endif  // VULNEXP_LEXER_H_
