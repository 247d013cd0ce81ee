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

// Acceptance checks. Each criterion prints exactly one PASS or FAIL line
// (plus optional NOTE lines) and sets the exit status accordingly.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "support/fixtures.h"
#include "vulnexp/bench.h"
#include "vulnexp/explanation.h"
#include "vulnexp/gateway.h"
#include "vulnexp/ingest.h"
#include "vulnexp/lexer.h"
#include "vulnexp/obfuscator.h"
#include "vulnexp/prompt.h"
#include "vulnexp/sarif.h"
#include "vulnexp/store.h"

namespace vulnexp::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

constexpr std::array<ExperienceLevel, 3> kLevels = {
    ExperienceLevel::kBeginner, ExperienceLevel::kIntermediate, ExperienceLevel::kAdvanced};

// ---------------------------------------------------------------------------

struct TableRow {
  const char* model;
  std::array<double, 3> original;    // P, R, F1
  std::array<double, 3> obfuscated;  // P, R, F1
};

// Printed precision, recall, and F1 for each model.
constexpr TableRow kTable[] = {
    {"GPT-5", {0.78, 0.98, 0.87}, {0.75, 0.96, 0.84}},
    {"o3-mini", {0.82, 0.90, 0.86}, {0.84, 0.88, 0.86}},
    {"GPT-5-mini", {0.72, 0.96, 0.83}, {0.75, 0.95, 0.84}},
    {"GPT-4o", {0.59, 1.00, 0.74}, {0.53, 0.99, 0.69}},
    {"Deepcoder (14B)", {0.70, 0.75, 0.72}, {0.65, 0.68, 0.66}},
    {"Llama3.1 (70B)", {0.57, 0.96, 0.72}, {0.56, 0.96, 0.70}},
    {"GPT-4o-mini", {0.54, 0.98, 0.70}, {0.55, 0.97, 0.70}},
    {"Gemma2 (9B)", {0.53, 0.99, 0.69}, {0.53, 0.88, 0.66}},
    {"CodeGemma (7B)", {0.57, 0.86, 0.69}, {0.52, 0.88, 0.65}},
    {"CodeLlama (70B)", {0.53, 0.96, 0.68}, {0.52, 0.94, 0.67}},
};

// Whether some P and R within half a unit of the printed values give an F1
// that rounds to the printed F1. F1 is monotone in both arguments, so the
// corners bound the reachable range.
bool IntervalConsistent(const std::array<double, 3>& t) {
  const double lo = F1Score(t[0] - 0.005, t[1] - 0.005);
  const double hi = F1Score(t[0] + 0.005, std::min(1.0, t[1] + 0.005));
  return lo <= t[2] + 0.005 && hi >= t[2] - 0.005;
}

Outcome MetricArithmetic(const std::string&) {
  Outcome o;
  int checked = 0;
  int interval_ok = 0;
  std::vector<std::string> misses;
  for (const TableRow& row : kTable) {
    for (const auto& [variant, t] : {std::pair{"Original", row.original},
                                     std::pair{"Obfuscated", row.obfuscated}}) {
      ++checked;
      const double f1 = F1Score(t[0], t[1]);
      if (std::fabs(f1 - t[2]) > 0.005 + 1e-12) {
        misses.push_back(std::string(row.model) + " " + variant + " (" + Fixed(t[0], 2) + ", " +
                         Fixed(t[1], 2) + ") -> " + Fixed(f1) + " vs " + Fixed(t[2], 2) +
                         " (diff " + Fixed(std::fabs(f1 - t[2])) + ")");
      }
      if (IntervalConsistent(t)) ++interval_ok;
    }
  }
  o.pass = misses.empty();
  o.detail = std::to_string(checked - static_cast<int>(misses.size())) + "/" +
             std::to_string(checked) + " printed triples within 0.005";
  for (const std::string& m : misses) o.detail += "; " + m;
  o.notes.push_back("interval check: " + std::to_string(interval_ok) + "/" +
                    std::to_string(checked) +
                    " triples consistent when printed P and R are read as +/-0.005 intervals");
  return o;
}

// ---------------------------------------------------------------------------

Outcome ScoringOracle(const std::string&) {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(20260301);
  int mismatches = 0;
  std::string first;
  constexpr int kCorpora = 1000;
  for (int n = 0; n < kCorpora; ++n) {
    const int size = std::uniform_int_distribution<int>(0, 32)(rng);
    std::vector<BenchCase> corpus;
    std::vector<Verdict> verdicts;
    for (int i = 0; i < size; ++i) {
      BenchCase c;
      c.case_id = "c" + std::to_string(i);
      c.label = rng() & 1;
      corpus.push_back(c);
      Verdict v;
      v.case_id = c.case_id;
      v.predicted = rng() & 1;
      v.parse_ok = (rng() % 4) != 0;
      verdicts.push_back(v);
    }
    std::shuffle(verdicts.begin(), verdicts.end(), rng);

    // Brute force: look up each case's verdict by linear search.
    int tp = 0, fp = 0, tn = 0, fn = 0;
    for (const BenchCase& c : corpus) {
      for (const Verdict& v : verdicts) {
        if (v.case_id != c.case_id) continue;
        if (c.label && v.predicted) ++tp;
        if (!c.label && v.predicted) ++fp;
        if (!c.label && !v.predicted) ++tn;
        if (c.label && !v.predicted) ++fn;
      }
    }
    const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);

    const ConfusionCounts counts = Score(verdicts, corpus);
    const Metrics m = ComputeMetrics(counts);
    const bool ok = counts == ConfusionCounts{tp, fp, tn, fn} && m.precision == p &&
                    m.recall == r && std::fabs(m.f1 - f1) <= 1e-12 &&
                    FormatRounded(m.f1) == FormatRounded(f1) &&
                    m.precision_undefined == (tp + fp == 0) &&
                    m.recall_undefined == (tp + fn == 0);
    if (!ok && mismatches++ == 0) first = "corpus " + std::to_string(n);
  }
  const double secs = Seconds(start);
  o.pass = mismatches == 0 && secs < 5.0;
  o.detail = std::to_string(kCorpora - mismatches) + "/" + std::to_string(kCorpora) +
             " corpora match the brute-force tally in " + Fixed(secs, 3) + " s";
  if (!first.empty()) o.detail += "; first mismatch at " + first;
  return o;
}

// ---------------------------------------------------------------------------

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult RunCommand(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
  result.status = pclose(pipe);
  return result;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome BenchDeterminism(const std::string& cli) {
  Outcome o;
  if (cli.empty() || !fs::exists(cli)) {
    o.detail = "CLI binary not found";
    return o;
  }
  const fs::path work = fs::temp_directory_path() / "vulnexp_acceptance_bench";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string base = Quote(cli) + " bench run --manifest " +
                           Quote(testing::FixturePath("bench/manifest.csv")) +
                           " --model oracle --bench-provider oracle";

  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = work / ("run" + std::to_string(run) + ".md");
    const CommandResult r = RunCommand(base + " --variant both --out " + Quote(out));
    if (r.status != 0) {
      o.detail = "oracle run exited with " + std::to_string(r.status) + ": " + r.output;
      return o;
    }
    reports.push_back(ReadFileBytes(out).value_or(""));
  }
  const std::string perfect_row = "| oracle | zero-shot | 1.00 | 1.00 | 1.00 | 1.00 | 1.00 | 1.00 |";
  const bool identical = !reports[0].empty() && reports[0] == reports[1];
  const bool perfect = reports[0].find(perfect_row) != std::string::npos;

  const fs::path flipped_out = work / "flipped.csv";
  const CommandResult flipped = RunCommand(
      base + " --flip BenchCase001,BenchCase008,BenchCase005,BenchCase011 --out " +
      Quote(flipped_out));
  const std::string csv = ReadFileBytes(flipped_out).value_or("");
  const bool counts_ok =
      flipped.status == 0 &&
      flipped.output.find("tp=8 fp=2 tn=8 fn=2") != std::string::npos;
  // P = 8/(8+2), R = 8/(8+2), F1 = 2PR/(P+R) = 0.80.
  const bool metrics_ok = csv.find("oracle,zero-shot,0.80,0.80,0.80,") != std::string::npos;

  o.pass = identical && perfect && counts_ok && metrics_ok;
  o.detail = std::string("reports ") + (identical ? "byte-identical" : "DIFFER") +
             ", oracle P=R=F1=1.00 " + (perfect ? "yes" : "NO") + ", flipped counts " +
             (counts_ok ? "tp=8 fp=2 tn=8 fn=2" : "WRONG") + ", flipped metrics " +
             (metrics_ok ? "0.80/0.80/0.80" : "WRONG");
  if (o.pass) fs::remove_all(work);
  return o;
}

// ---------------------------------------------------------------------------

std::vector<std::string> LiteralTexts(const TokenStream& ts) {
  std::vector<std::string> out;
  for (const Token& t : ts.tokens) {
    if (t.kind == TokenKind::kStringLiteral || t.kind == TokenKind::kCharLiteral) {
      out.push_back(t.text);
    }
  }
  return out;
}

// Empty on success, otherwise the first violated property.
std::string ObfuscationViolation(const std::string& src) {
  const IdentifierSet& protected_names = DefaultProtectedIdentifiers();
  const TokenStream ts = Tokenize(src);
  const ObfuscatedSource first = ObfuscateSource(src, protected_names);
  const ObfuscatedSource second = ObfuscateSource(src, protected_names);
  const TokenStream out = Tokenize(first.text);
  if (out.Kinds() != ts.Kinds()) return "token kinds changed";
  if (ApplyRenames(out, first.map.Inverse()) != src) return "inverse map does not restore bytes";
  if (first.text != second.text || !(first.map == second.map)) return "nondeterministic";
  if (LiteralTexts(out) != LiteralTexts(ts)) return "literal bytes changed";
  for (size_t i = 0; i < ts.tokens.size(); ++i) {
    const Token& t = ts.tokens[i];
    if (t.kind == TokenKind::kIdentifier && protected_names.count(t.text) &&
        out.tokens[i].text != t.text) {
      return "protected identifier " + t.text + " renamed";
    }
  }
  return {};
}

Outcome ObfuscatorProperties(const std::string&) {
  Outcome o;
  const auto start = Clock::now();
  int files = 0;
  std::vector<std::string> failures;
  for (const auto& entry : fs::directory_iterator(testing::FixturePath("bench/cases"))) {
    if (!IsObfuscatableFile(entry.path())) continue;
    ++files;
    const std::string why = ObfuscationViolation(ReadFileBytes(entry.path()).value_or(""));
    if (!why.empty()) failures.push_back(entry.path().filename().string() + ": " + why);
  }
  const double secs = Seconds(start);
  o.pass = files > 0 && failures.empty() && secs < 2.0;
  o.detail = std::to_string(files - static_cast<int>(failures.size())) + "/" +
             std::to_string(files) + " corpus sources satisfy all properties in " +
             Fixed(secs, 3) + " s";
  for (const std::string& f : failures) o.detail += "; " + f;
  return o;
}

// ---------------------------------------------------------------------------

Outcome PromptGoldens(const std::string&) {
  Outcome o;
  const std::regex placeholder(R"(\{[A-Za-z_][A-Za-z0-9_]*\})");
  const auto findings = testing::NamedFindings();
  int matched = 0;
  int total = 0;
  size_t placeholders = 0;
  std::vector<std::string> failures;
  for (const std::string& name : testing::GoldenFindingNames()) {
    for (ExperienceLevel level : kLevels) {
      ++total;
      const std::string rel = testing::GoldenRel(name, level);
      const std::string text = testing::GoldenText(RenderExplanationPrompt(findings.at(name), level));
      if (auto golden = ReadFileBytes(testing::FixturePath(rel)); golden && *golden == text) {
        ++matched;
      } else {
        failures.push_back(rel);
      }
      placeholders += std::distance(std::sregex_iterator(text.begin(), text.end(), placeholder),
                                    std::sregex_iterator());
    }
  }
  const std::string sentence =
      "Explain the vulnerability detected in the code snippet to a developer who has "
      "beginner experience in software security.";
  const bool has_sentence =
      RenderExplanationPrompt(findings.at("xss"), ExperienceLevel::kBeginner)
          .user_text.find(sentence) != std::string::npos;
  o.pass = matched == total && placeholders == 0 && has_sentence;
  o.detail = std::to_string(matched) + "/" + std::to_string(total) + " goldens byte-match, " +
             std::to_string(placeholders) + " unresolved placeholders, beginner sentence " +
             (has_sentence ? "present" : "MISSING");
  for (const std::string& f : failures) o.detail += "; mismatch " + f;
  return o;
}

// ---------------------------------------------------------------------------

Outcome SarifPipeline(const std::string&) {
  Outcome o;
  const auto start = Clock::now();
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  const std::map<std::string, size_t> expected_counts = {
      {"minimal.sarif", 1}, {"flows.sarif", 3}, {"empty.sarif", 0}};
  for (const auto& [name, count] : expected_counts) {
    const SarifDocument doc = ParseSarif(testing::ReadFixture(name));
    const auto findings = BuildFindings(doc, testing::FixtureDir(), testing::FixtureCatalogs());
    check(findings.size() == count, name + " finding count");
    const SarifDocument again = ParseSarif(SerializeSarif(doc).dump());
    check(again == doc, name + " serialize/parse round-trip");
    check(NormalizeFindings(again) == NormalizeFindings(doc), name + " projection round-trip");
    for (const Finding& f : findings) {
      check(json(f).get<Finding>() == f, name + " finding JSON round-trip");
    }
  }

  const auto flows = testing::ImportFixture("flows.sarif");
  if (flows.size() == 3) {
    check(flows[0].severity == Severity::kHigh, "xss severity from result level");
    check(flows[1].severity == Severity::kHigh, "sqli severity from rule default");
    check(flows[2].severity == Severity::kLow, "note severity");
    const auto& xss = flows[0].data_flow;
    check(xss && xss->source.location.start_line == 12 && xss->intermediates.size() == 1 &&
              xss->sink.location.start_line == 22,
          "xss flow partition");
    const auto& sqli = flows[1].data_flow;
    check(sqli && sqli->intermediates.empty() && sqli->source.location.start_line == 16 &&
              sqli->sink.location.start_line == 18,
          "sqli flow partition");
    check(!flows[2].data_flow.has_value(), "flowless result");
  }
  const auto minimal = testing::ImportFixture("minimal.sarif");
  check(!minimal.empty() && minimal[0].severity == Severity::kMedium, "warning severity");

  for (const auto& [name, kind] :
       {std::pair{"malformed.sarif", SarifError::Kind::kMalformedJson},
        std::pair{"not_sarif.json", SarifError::Kind::kNotSarif},
        std::pair{"unsupported_version.sarif", SarifError::Kind::kUnsupportedVersion}}) {
    try {
      ParseSarif(testing::ReadFixture(name));
      problems.push_back(std::string(name) + " accepted");
    } catch (const SarifError& e) {
      check(e.kind() == kind, std::string(name) + " error kind");
    }
  }

  const double secs = Seconds(start);
  o.pass = problems.empty() && secs < 1.0;
  o.detail = "counts 1/3/0, severities, flow partitions, round-trips in " + Fixed(secs, 3) + " s";
  for (const std::string& p : problems) o.detail += "; FAILED " + p;
  return o;
}

// ---------------------------------------------------------------------------

Outcome ReplayEndToEnd(const std::string&) {
  Outcome o;
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };

  auto store = Store::Open(":memory:");
  auto gateway = std::make_shared<LlmGateway>(
      ReplayProvider::FromFile(testing::FixturePath("transcripts/explanations.json")));
  ExplanationService service(*store, gateway);
  const auto findings = testing::NamedFindings();

  int explained = 0;
  for (const std::string& name : testing::GoldenFindingNames()) {
    for (ExperienceLevel level : kLevels) {
      const ExplainResult r = service.Explain(findings.at(name), level);
      const Explanation& e = r.explanation;
      const ParsedSections s = ParseSections(e.raw_text);
      check(!r.cache_hit, name + " first call is a miss");
      check(e.parse_ok && s.parse_ok, name + " sections parse");
      check(s.cause == e.cause && s.impact == e.impact && s.mitigation == e.mitigation,
            name + " sections round-trip");
      check(json(e).get<Explanation>() == e, name + " explanation JSON round-trip");
      ++explained;
    }
  }
  const uint64_t calls = service.gateway_calls();
  int hits = 0;
  for (const std::string& name : testing::GoldenFindingNames()) {
    for (ExperienceLevel level : kLevels) {
      if (service.Explain(findings.at(name), level).cache_hit) ++hits;
    }
  }
  check(service.gateway_calls() == calls, "repeat requests reached the gateway");
  check(hits == explained, "repeat requests missed the cache");

  const auto feedback =
      json::parse(testing::ReadFixture("feedback_20.json")).get<std::vector<Feedback>>();
  for (const Feedback& f : feedback) service.RecordFeedback(f);
  // Rating counts 1..5 per criterion, tallied by hand from the fixture.
  const std::array<std::array<int, 5>, 5> tally = {{{1, 3, 3, 8, 5},
                                                    {1, 2, 3, 7, 7},
                                                    {0, 3, 5, 9, 3},
                                                    {0, 2, 4, 9, 5},
                                                    {1, 3, 3, 7, 6}}};
  const FeedbackSummary summary = service.SummarizeFeedback();
  check(summary.feedback_count == 20 && summary.thumbs_up == 14 && summary.thumbs_down == 6,
        "feedback totals");
  check(summary.rows.size() == 5, "five criteria");
  for (size_t i = 0; i < summary.rows.size() && i < 5; ++i) {
    check(summary.rows[i].counts == tally[i], "criterion row " + std::to_string(i));
    for (size_t v = 0; v < 5; ++v) {
      check(std::fabs(summary.rows[i].percentages[v] - tally[i][v] * 5.0) < 1e-9,
            "criterion percentage " + std::to_string(i));
    }
  }

  o.pass = problems.empty();
  o.detail = std::to_string(explained) + " explanations round-trip, " + std::to_string(calls) +
             " gateway calls then " + std::to_string(service.gateway_calls() - calls) +
             " on " + std::to_string(explained) + " repeats, 20-rating summary " +
             (problems.empty() ? "matches" : "checked");
  for (const std::string& p : problems) o.detail += "; FAILED " + p;
  return o;
}

}  // namespace
}  // namespace vulnexp::acceptance

int main(int argc, char** argv) {
  using namespace vulnexp::acceptance;
  const std::map<std::string, std::function<Outcome(const std::string&)>> criteria = {
      {"metric_arithmetic", MetricArithmetic},
      {"scoring_oracle", ScoringOracle},
      {"bench_determinism", BenchDeterminism},
      {"obfuscator_properties", ObfuscatorProperties},
      {"prompt_goldens", PromptGoldens},
      {"sarif_pipeline", SarifPipeline},
      {"replay_end_to_end", ReplayEndToEnd},
  };

  CLI::App app{"vulnexp acceptance checks"};
  std::vector<std::string> selected;
  std::string cli;
  app.add_option("--criterion", selected, "Criterion to run; repeatable (default all)");
  app.add_option("--cli", cli, "Path to the vulnexp binary");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (const auto& [name, fn] : criteria) selected.push_back(name);
  }

  bool all_pass = true;
  for (const std::string& name : selected) {
    auto it = criteria.find(name);
    Outcome outcome;
    if (it == criteria.end()) {
      outcome.detail = "unknown criterion";
    } else {
      try {
        outcome = it->second(cli);
      } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("threw: ") + e.what();
      }
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << "\n";
    for (const std::string& note : outcome.notes) std::cout << "NOTE " << name << ": " << note << "\n";
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
