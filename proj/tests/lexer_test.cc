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

#include <random>

#include "gtest/gtest.h"

namespace vulnexp {
namespace {

using K = TokenKind;

TEST(LexerTest, DeclarationWithTrailingComment) {
  const TokenStream ts = Tokenize("int a = 1; // x");
  const std::vector<K> expected = {K::kKeyword,      K::kWhitespace, K::kIdentifier, K::kWhitespace,
                                   K::kPunct,        K::kWhitespace, K::kNumberLiteral, K::kPunct,
                                   K::kWhitespace,   K::kComment};
  EXPECT_EQ(ts.Kinds(), expected);
  EXPECT_EQ(ts.tokens.back().text, "// x");
}

TEST(LexerTest, EmptyInputGivesEmptyStream) {
  EXPECT_TRUE(Tokenize("").tokens.empty());
}

TEST(LexerTest, CommentMarkerInsideStringIsPartOfLiteral) {
  const TokenStream ts = Tokenize(R"("a // b")");
  ASSERT_EQ(ts.tokens.size(), 1u);
  EXPECT_EQ(ts.tokens[0].kind, K::kStringLiteral);
}

TEST(LexerTest, EscapedQuotesStayInsideLiteral) {
  const TokenStream ts = Tokenize(R"(s = "say \"hi\"";)");
  ASSERT_GE(ts.tokens.size(), 5u);
  EXPECT_EQ(ts.tokens[4].kind, K::kStringLiteral);
  EXPECT_EQ(ts.tokens[4].text, R"("say \"hi\"")");
}

TEST(LexerTest, CharLiterals) {
  const TokenStream ts = Tokenize(R"(c = '\'';)");
  EXPECT_EQ(ts.tokens[4].kind, K::kCharLiteral);
  EXPECT_EQ(ts.tokens[4].text, R"('\'')");
}

TEST(LexerTest, JavaTextBlockIsOneToken) {
  const std::string src = "String q = \"\"\"\n  SELECT \"x\"\n  \"\"\";";
  const TokenStream ts = Tokenize(src);
  int literals = 0;
  for (const Token& t : ts.tokens) literals += t.kind == K::kStringLiteral;
  EXPECT_EQ(literals, 1);
  EXPECT_EQ(ts.Concat(), src);
}

TEST(LexerTest, BlockCommentSpansLines) {
  const TokenStream ts = Tokenize("a /* one\ntwo */ b");
  ASSERT_EQ(ts.tokens.size(), 5u);
  EXPECT_EQ(ts.tokens[2].kind, K::kComment);
  EXPECT_EQ(ts.tokens[2].text, "/* one\ntwo */");
}

TEST(LexerTest, UnterminatedBlockCommentIsFlagged) {
  const TokenStream ts = Tokenize("x /* never closed");
  ASSERT_FALSE(ts.tokens.empty());
  EXPECT_TRUE(ts.tokens.back().unterminated);
  EXPECT_TRUE(ts.HasUnterminated());
  EXPECT_EQ(ts.Concat(), "x /* never closed");
}

TEST(LexerTest, UnterminatedStringIsFlaggedAndLossless) {
  const std::string src = "s = \"open\nnext = 1;";
  const TokenStream ts = Tokenize(src);
  EXPECT_TRUE(ts.HasUnterminated());
  EXPECT_EQ(ts.Concat(), src);
}

TEST(LexerTest, NumbersWithSuffixesAndExponents) {
  for (const char* n : {"0x1F", "1L", "3.5e-2", "1_000", "2.0f", ".5"}) {
    const TokenStream ts = Tokenize(n);
    ASSERT_EQ(ts.tokens.size(), 1u) << n;
    EXPECT_EQ(ts.tokens[0].kind, K::kNumberLiteral) << n;
  }
}

TEST(LexerTest, KeywordsVersusIdentifiers) {
  EXPECT_TRUE(IsKeyword("class"));
  EXPECT_TRUE(IsKeyword("null"));
  EXPECT_TRUE(IsKeyword("struct"));
  EXPECT_FALSE(IsKeyword("String"));
  EXPECT_FALSE(IsKeyword("klass"));
}

TEST(LexerTest, OffsetsPointIntoSource) {
  const std::string src = "foo(bar, \"baz\");";
  for (const Token& t : Tokenize(src).tokens) {
    EXPECT_EQ(src.substr(t.offset, t.text.size()), t.text);
  }
}

// Any byte string, including invalid UTF-8 and stray quotes, must round-trip.
TEST(LexerPropertyTest, ConcatReproducesRandomInput) {
  std::mt19937 rng(7);
  const std::string alphabet = "ab_Z09 \t\n\"'/\\*{}();.,=<>#@$\x80\xff";
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 80);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string src;
    for (int i = len(rng); i > 0; --i) src += alphabet[pick(rng)];
    const TokenStream ts = Tokenize(src);
    ASSERT_EQ(ts.Concat(), src) << "trial " << trial;
    for (const Token& t : ts.tokens) ASSERT_FALSE(t.text.empty());
  }
}

}  // namespace
}  // namespace vulnexp
