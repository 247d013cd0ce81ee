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

#ifndef VULNEXP_TESTS_SUPPORT_FIXTURES_H_
#define VULNEXP_TESTS_SUPPORT_FIXTURES_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vulnexp/catalog.h"
#include "vulnexp/finding.h"
#include "vulnexp/ingest.h"
#include "vulnexp/prompt.h"
#include "vulnexp/sarif.h"
#include "vulnexp/util.h"

namespace vulnexp::testing {

inline std::filesystem::path FixtureDir() { return VULNEXP_FIXTURE_DIR; }

inline std::filesystem::path FixturePath(const std::string& rel) {
  return FixtureDir() / rel;
}

inline std::string ReadFixture(const std::string& rel) {
  auto text = ReadFileBytes(FixturePath(rel));
  if (!text) throw std::runtime_error("missing fixture " + rel);
  return *text;
}

inline Catalogs FixtureCatalogs() {
  return LoadCatalogs(FixturePath("cwe.json"), FixturePath("methods.json"));
}

inline std::vector<Finding> ImportFixture(const std::string& sarif_rel) {
  return BuildFindings(ParseSarif(ReadFixture(sarif_rel)), FixtureDir(),
                       FixtureCatalogs());
}

// The findings used by prompt goldens and replay transcripts:
//   xss     flows.sarif java/xss, 3-step flow
//   sqli    flows.sarif java/sql-injection at UserDao.java:18, 2-step flow
//   writer  minimal.sarif semgrep no-direct-response-writer, no flow
//   sqli_noflow  flows.sarif java/sql-injection at UserDao.java:23
inline std::map<std::string, Finding> NamedFindings() {
  std::map<std::string, Finding> out;
  for (const Finding& f : ImportFixture("flows.sarif")) {
    if (f.rule_id == "java/xss") out["xss"] = f;
    if (f.rule_id == "java/sql-injection" && f.location.start_line == 18) out["sqli"] = f;
    if (f.rule_id == "java/sql-injection" && f.location.start_line == 23) out["sqli_noflow"] = f;
  }
  out["writer"] = ImportFixture("minimal.sarif").at(0);
  return out;
}

inline const std::vector<std::string>& GoldenFindingNames() {
  static const std::vector<std::string> kNames = {"xss", "sqli", "writer"};
  return kNames;
}

inline std::string GoldenText(const PromptBundle& bundle) {
  return "=== system ===\n" + bundle.system_text + "\n=== user ===\n" + bundle.user_text + "\n";
}

inline std::string GoldenRel(const std::string& name, ExperienceLevel level) {
  return "goldens/" + name + "_" + std::string(ExperienceLevelName(level)) + ".txt";
}

}  // namespace vulnexp::testing

#endif  // VULNEXP_TESTS_SUPPORT_FIXTURES_H_
