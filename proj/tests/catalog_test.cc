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

#include "gtest/gtest.h"
#include "support/fixtures.h"

namespace vulnexp {
namespace {

TEST(CweCatalogTest, ParsesFixture) {
  const auto cwes = ParseCweCatalog(testing::ReadFixture("cwe.json"));
  ASSERT_EQ(cwes.size(), 3u);
  EXPECT_EQ(cwes[1].cwe_id, "CWE-79");
  EXPECT_EQ(cwes[1].rank, 1);
  EXPECT_NE(cwes[1].summary.find("Encode output"), std::string::npos);
}

TEST(CweCatalogTest, EmptyFileIsEmptyCatalog) {
  EXPECT_TRUE(ParseCweCatalog("").empty());
  EXPECT_TRUE(ParseCweCatalog("  \n").empty());
  EXPECT_TRUE(ParseMethodCatalog("[]").empty());
}

TEST(CweCatalogTest, ErrorsCarryLineAndField) {
  const std::string text =
      "[\n"
      "  {\"cwe_id\": \"CWE-1\", \"name\": \"a\", \"summary\": \"\"},\n"
      "  {\"cwe_id\": \"CWE-2\", \"summary\": \"\"}\n"
      "]\n";
  try {
    ParseCweCatalog(text, "cwe.json");
    FAIL() << "expected CatalogError";
  } catch (const CatalogError& e) {
    EXPECT_EQ(e.kind(), CatalogError::Kind::kParse);
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "name");
    EXPECT_NE(std::string(e.what()).find("cwe.json:3"), std::string::npos);
  }
}

TEST(CweCatalogTest, RejectsBadIdAndMalformedJson) {
  EXPECT_THROW(ParseCweCatalog(R"([{"cwe_id":"79","name":"x","summary":""}])"), CatalogError);
  EXPECT_THROW(ParseCweCatalog(R"({"cwe_id":"CWE-79"})"), CatalogError);
  try {
    ParseCweCatalog("[\n{\"cwe_id\": \n");
    FAIL();
  } catch (const CatalogError& e) {
    EXPECT_EQ(e.kind(), CatalogError::Kind::kParse);
    EXPECT_GE(e.line(), 2);
  }
}

TEST(CweCatalogTest, DuplicateIdRejected) {
  try {
    ParseCweCatalog(
        R"([{"cwe_id":"CWE-79","name":"a","summary":""},{"cwe_id":"CWE-79","name":"b","summary":""}])");
    FAIL();
  } catch (const CatalogError& e) {
    EXPECT_EQ(e.kind(), CatalogError::Kind::kDuplicateEntry);
  }
}

TEST(MethodCatalogTest, ParsesCategoriesAndFinalIdentifier) {
  const auto methods = ParseMethodCatalog(testing::ReadFixture("methods.json"));
  ASSERT_EQ(methods.size(), 6u);
  EXPECT_EQ(methods[0].category, MethodCategory::kSource);
  EXPECT_EQ(methods[2].FinalIdentifier(), "getWriter");
  EXPECT_EQ(methods[5].category, MethodCategory::kSanitizer);
  EXPECT_THROW(
      ParseMethodCatalog(R"([{"qualified_name":"a.b","category":"Filter","note":""}])"),
      CatalogError);
}

TEST(CatalogsTest, LookupAndDuplicateConstruction) {
  const Catalogs c = testing::FixtureCatalogs();
  ASSERT_NE(c.FindCwe("CWE-89"), nullptr);
  EXPECT_EQ(c.FindCwe("CWE-999"), nullptr);
  ASSERT_NE(c.FindMethod("java.sql.Statement.executeQuery"), nullptr);
  EXPECT_THROW(Catalogs({CweEntry{"CWE-1", "a", "", {}}, CweEntry{"CWE-1", "b", "", {}}}, {}),
               CatalogError);
}

TEST(CatalogsTest, BundledCatalogsLoad) {
  const Catalogs& c = DefaultCatalogs();
  EXPECT_GE(c.cwes().size(), 20u);
  ASSERT_NE(c.FindCwe("CWE-79"), nullptr);
  EXPECT_EQ(c.FindCwe("CWE-79")->rank, 1);
  EXPECT_NE(c.FindMethod("javax.servlet.http.HttpServletResponse.getWriter"), nullptr);
}

TEST(CweMappingTest, FromTags) {
  EXPECT_EQ(CweFromTags({"security", "external/cwe/cwe-079"}), "CWE-79");
  EXPECT_EQ(CweFromTags({"CWE-89: SQL Injection"}), "CWE-89");
  EXPECT_FALSE(CweFromTags({"security", "NOTCWE-12x"}).has_value());
  EXPECT_FALSE(CweFromTags({}).has_value());
}

TEST(CweMappingTest, FromRuleIdKeywords) {
  EXPECT_EQ(CweFromRuleId("java/xss"), "CWE-79");
  EXPECT_EQ(CweFromRuleId("java/sql-injection"), "CWE-89");
  EXPECT_EQ(CweFromRuleId("PathTraversal"), "CWE-22");
  EXPECT_FALSE(CweFromRuleId("java/unused-variable").has_value());
}

TEST(CallIdentifiersTest, FirstOccurrenceOrderWithoutDuplicates) {
  EXPECT_EQ(CallIdentifiers("a.getWriter().println(x); getWriter (); String s = \"f()\";"),
            (std::vector<std::string>{"getWriter", "println"}));
}

TEST(AnnotateTest, AttachesCweAndCriticalMethods) {
  Finding f;
  f.rule_id = "java/xss";
  f.rule_tags = {"external/cwe/cwe-079"};
  f.context.enclosing_source =
      "String n = request.getParameter(\"n\");\nresponse.getWriter().println(n);";
  const Finding out = Annotate(f, testing::FixtureCatalogs());
  ASSERT_TRUE(out.cwe.has_value());
  EXPECT_EQ(out.cwe->name.substr(0, 28), "Improper Neutralization of I");
  ASSERT_EQ(out.critical_methods.size(), 2u);
  EXPECT_EQ(out.critical_methods[0].FinalIdentifier(), "getParameter");
  EXPECT_EQ(out.critical_methods[1].FinalIdentifier(), "getWriter");
}

TEST(AnnotateTest, TagWinsOverRuleIdAndUnknownCweKeepsId) {
  Finding f;
  f.rule_id = "java/xss";
  f.rule_tags = {"CWE-611"};
  const Finding out = Annotate(f, testing::FixtureCatalogs());
  ASSERT_TRUE(out.cwe.has_value());
  EXPECT_EQ(out.cwe->cwe_id, "CWE-611");
  EXPECT_TRUE(out.cwe->name.empty());
}

TEST(AnnotateTest, NoCweWhenNothingMatches) {
  Finding f;
  f.rule_id = "style/long-line";
  EXPECT_FALSE(Annotate(f, testing::FixtureCatalogs()).cwe.has_value());
}

}  // namespace
}  // namespace vulnexp
