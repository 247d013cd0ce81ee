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

#ifndef VULNEXP_BENCH_H_
#define VULNEXP_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vulnexp/gateway.h"
#include "vulnexp/obfuscator.h"
#include "vulnexp/prompt.h"

namespace vulnexp {

enum class Variant { kOriginal, kObfuscated };

std::string_view VariantName(Variant v);  // "original" / "obfuscated"
std::optional<Variant> ParseVariant(std::string_view text);

struct BenchCase {
  std::string case_id;
  std::string relative_path;
  std::string source;
  bool label = false;  // true when the case is really vulnerable
  std::string cwe_id;
  Variant variant = Variant::kOriginal;
};

class BenchError : public std::runtime_error {
 public:
  enum class Kind { kManifestParse, kMissingSource, kCaseMismatch };

  BenchError(Kind kind, const std::string& what, int row = 0)
      : std::runtime_error(what), kind_(kind), row_(row) {}
  Kind kind() const { return kind_; }
  // 1-based manifest line, 0 when not applicable.
  int row() const { return row_; }

 private:
  Kind kind_;
  int row_;
};

// Accepts either a CSV with a header naming case_id, relative_path, label,
// cwe_id (any column order), or the OWASP Benchmark expected-results file
// ("# test name, category, real vulnerability, cwe, ..."). For the latter,
// sources are looked up as <root>/<name>.java and then under the
// benchmark's testcode package directory.
std::vector<BenchCase> LoadCorpus(const std::filesystem::path& manifest,
                                  const std::filesystem::path& source_root);
std::vector<BenchCase> ParseCorpus(std::string_view manifest_text,
                                   const std::filesystem::path& source_root);

// Obfuscates each source independently; labels and ids are unchanged.
std::vector<BenchCase> MakeVariant(
    const std::vector<BenchCase>& corpus, Variant variant, uint64_t seed = 0,
    const IdentifierSet& protected_names = DefaultProtectedIdentifiers());

struct Verdict {
  std::string case_id;
  bool predicted = false;
  std::optional<std::string> predicted_cwe;
  std::string raw_response;
  bool parse_ok = false;
  std::optional<std::string> error;  // gateway failure for this case

  bool operator==(const Verdict&) const = default;
};

struct ParsedVerdict {
  bool predicted = false;
  std::optional<std::string> predicted_cwe;
  bool parse_ok = false;

  bool operator==(const ParsedVerdict&) const = default;
};

// The last "VERDICT: YES|NO" line decides; an unparseable response counts
// as predicted=false.
ParsedVerdict ParseVerdict(std::string_view raw);

struct BenchRunConfig {
  std::string model_id;
  PromptStrategy strategy = PromptStrategy::kZeroShot;
  Variant variant = Variant::kOriginal;
  size_t parallelism = 4;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  uint64_t obfuscation_seed = 0;
  std::vector<FewShotExample> examples = DefaultFewShotExamples();
  TemplateSet templates = TemplateSet::Builtin();
  // When set, raw responses and run-manifest.json are written here.
  std::optional<std::filesystem::path> run_dir;
};

// Builds the chat request for one case; request_tag is the case id.
ChatRequest BuildDetectionRequest(const BenchCase& c, const BenchRunConfig& config);

// One verdict per case in corpus order. `corpus` is the Original variant;
// the Obfuscated variant is derived here when requested.
std::vector<Verdict> RunBenchmark(const std::vector<BenchCase>& corpus,
                                  const LlmGateway& gateway,
                                  const BenchRunConfig& config);

struct ConfusionCounts {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;

  int total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Aligns by case_id; throws BenchError(kCaseMismatch) when the id sets
// differ.
ConfusionCounts Score(const std::vector<Verdict>& verdicts,
                      const std::vector<BenchCase>& corpus);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;  // tp + fp == 0
  bool recall_undefined = false;     // tp + fn == 0
};

Metrics ComputeMetrics(const ConfusionCounts& counts);
// Harmonic mean, 0 when precision + recall is 0.
double F1Score(double precision, double recall);

struct MetricRow {
  std::string model_id;
  PromptStrategy strategy = PromptStrategy::kZeroShot;
  Variant variant = Variant::kOriginal;
  Metrics metrics;
  ConfusionCounts counts;
};

enum class ReportFormat { kMarkdown, kCsv };

// Half-up to two decimals, e.g. 0.745 -> "0.75".
std::string FormatRounded(double value);

// One line per (model, strategy) with paired Original/Obfuscated P, R, F1,
// sorted by Original F1 descending. Missing cells print "-".
std::string EmitReport(const std::vector<MetricRow>& rows, ReportFormat format);

// Scripted answers from the corpus labels. Cases named in `flipped` get the
// opposite answer. Requests are matched by request_tag.
ScriptedProvider::Script OracleScript(const std::vector<BenchCase>& corpus,
                                      const std::set<std::string>& flipped = {});

}  // namespace vulnexp

#endif  // VULNEXP_BENCH_H_
