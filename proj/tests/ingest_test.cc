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

#include "vulnexp/ingest.h"

#include <filesystem>

#include "gtest/gtest.h"
#include "support/fixtures.h"

namespace vulnexp {
namespace {

namespace fs = std::filesystem;

std::vector<Finding> FlowFindings() {
  return BuildFindings(ParseSarif(testing::ReadFixture("flows.sarif")), testing::FixtureDir(),
                       testing::FixtureCatalogs());
}

TEST(BuildFindingsTest, FlowsFixtureCountsAndFingerprints) {
  const auto findings = FlowFindings();
  ASSERT_EQ(findings.size(), 3u);
  // Independent digests, see sarif_test for the key layout.
  EXPECT_EQ(findings[0].fingerprint, "a12888bd859be6fc98b6d429");
  EXPECT_EQ(findings[1].fingerprint, "c1e46ba9ef6f13ba8b23cad2");
  EXPECT_EQ(findings[2].fingerprint, "7dbe31b092e589188fbf053f");
  EXPECT_EQ(findings[0].rule_id, "java/xss");
  EXPECT_EQ(findings[1].location.start_line, 18);
  EXPECT_EQ(findings[2].location.start_line, 23);
}

TEST(BuildFindingsTest, SeverityFallsBackToRuleDefault) {
  const auto findings = FlowFindings();
  EXPECT_EQ(findings[0].severity, Severity::kHigh);  // result level error
  EXPECT_EQ(findings[1].severity, Severity::kHigh);  // rule default error
  EXPECT_EQ(findings[2].severity, Severity::kLow);   // result level note
}

TEST(BuildFindingsTest, MediumWhenNoLevelAnywhere) {
  const SarifDocument doc = ParseSarif(R"({"version":"2.1.0","runs":[{"tool":{"driver":
      {"name":"t"}},"results":[{"ruleId":"r","message":{"text":"m"}}]}]})");
  const auto findings = NormalizeFindings(doc);
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].severity, Severity::kMedium);
  EXPECT_EQ(findings[0].tool_confidence, "unreported");
}

TEST(BuildFindingsTest, ContextFlowAndCatalogs) {
  const auto findings = FlowFindings();
  const Finding& xss = findings[0];
  EXPECT_EQ(xss.context.mode, ExtractionMode::kSyntaxAware);
  EXPECT_EQ(xss.context.window_start_line, 10);
  EXPECT_EQ(xss.context.window_end_line, 30);
  ASSERT_TRUE(xss.data_flow.has_value());
  EXPECT_EQ(xss.data_flow->source.snippet, "String name = request.getParameter(\"name\");");
  EXPECT_EQ(xss.data_flow->intermediates.at(0).snippet, "String greeting = \"Hello, \" + name;");
  EXPECT_EQ(xss.data_flow->sink.snippet, "out.println(page.append(greeting).toString());");
  ASSERT_TRUE(xss.cwe.has_value());
  EXPECT_EQ(xss.cwe->cwe_id, "CWE-79");
  std::vector<std::string> names;
  for (const auto& m : xss.critical_methods) names.emplace_back(m.FinalIdentifier());
  EXPECT_EQ(names, (std::vector<std::string>{"getParameter", "getHeader", "getWriter"}));

  EXPECT_EQ(findings[1].cwe->cwe_id, "CWE-89");
  EXPECT_EQ(findings[1].tool_confidence, "high");
  EXPECT_FALSE(findings[2].data_flow.has_value());
}

TEST(BuildFindingsTest, DuplicateResultsGetDistinctFingerprints) {
  const std::string result =
      R"({"ruleId":"r","message":{"text":"m"},"locations":[{"physicalLocation":
         {"artifactLocation":{"uri":"a.java"},"region":{"startLine":2}}}]})";
  const SarifDocument doc = ParseSarif(R"({"version":"2.1.0","runs":[{"tool":{"driver":
      {"name":"t"}},"results":[)" + result + "," + result + "]}]}");
  const auto findings = NormalizeFindings(doc);
  ASSERT_EQ(findings.size(), 2u);
  EXPECT_NE(findings[0].fingerprint, findings[1].fingerprint);
}

TEST(BuildFindingsTest, ReimportIsStable) {
  const auto a = FlowFindings();
  const auto b = FlowFindings();
  EXPECT_EQ(a, b);
}

TEST(BuildFindingsTest, MissingSourceRootGivesUnavailableContext) {
  const auto findings = BuildFindings(ParseSarif(testing::ReadFixture("minimal.sarif")),
                                      "/nonexistent/vulnexp/root", testing::FixtureCatalogs());
  ASSERT_EQ(findings.size(), 1u);
  EXPECT_EQ(findings[0].context.mode, ExtractionMode::kUnavailable);
  EXPECT_EQ(findings[0].rule_name, "no-direct-response-writer");
  EXPECT_EQ(findings[0].tool_confidence, "MEDIUM");
}

TEST(RelativizeLocationTest, AbsolutePathsUnderRoot) {
  const fs::path root = fs::weakly_canonical(testing::FixtureDir());
  CodeLocation loc;
  loc.file_uri = (root / "src/main/java/com/example/Short.java").string();
  loc.external = true;
  const CodeLocation rel = RelativizeLocation(loc, root);
  EXPECT_FALSE(rel.external);
  EXPECT_EQ(rel.file_uri, "src/main/java/com/example/Short.java");

  loc.file_uri = "file://" + (root / "cwe.json").string();
  EXPECT_EQ(RelativizeLocation(loc, root).file_uri, "cwe.json");

  loc.file_uri = "/usr/include/stdio.h";
  EXPECT_TRUE(RelativizeLocation(loc, root).external);
}

}  // namespace
}  // namespace vulnexp
