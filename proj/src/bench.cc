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

#include "vulnexp/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "vulnexp/util.h"

namespace vulnexp {

namespace fs = std::filesystem;

namespace {

// RFC 4180 records: quoted fields may contain commas, quotes ("") and
// newlines. Returns (line number, fields) per non-empty record.
std::vector<std::pair<int, std::vector<std::string>>> ParseCsv(std::string_view text) {
  std::vector<std::pair<int, std::vector<std::string>>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;
  int record_line = 1;
  auto end_record = [&] {
    if (field_started || !fields.empty()) {
      fields.push_back(std::move(field));
      records.emplace_back(record_line, std::move(fields));
    }
    fields.clear();
    field.clear();
    field_started = false;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) {
    throw BenchError(BenchError::Kind::kManifestParse,
                     "manifest: unterminated quoted field", record_line);
  }
  end_record();
  return records;
}

std::optional<bool> ParseBool(std::string_view text) {
  std::string lower = ToLower(Trim(text));
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  return std::nullopt;
}

std::string NormalizeCweId(std::string_view text) {
  std::string t(Trim(text));
  if (t.empty()) return t;
  if (std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return "CWE-" + t;
  }
  std::string upper = t;
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return upper;
}

std::string ReadCaseSource(const fs::path& root, const std::string& rel, int row,
                           const std::string& case_id) {
  auto bytes = ReadFileBytes(root / rel);
  if (!bytes) {
    throw BenchError(BenchError::Kind::kMissingSource,
                     "manifest row " + std::to_string(row) + " (" + case_id +
                         "): source file not found: " + rel,
                     row);
  }
  if (bytes->empty()) {
    throw BenchError(BenchError::Kind::kMissingSource,
                     "manifest row " + std::to_string(row) + " (" + case_id +
                         "): source file is empty: " + rel,
                     row);
  }
  return SanitizeUtf8(*bytes);
}

void CheckUnique(const std::vector<BenchCase>& cases) {
  std::set<std::string> seen;
  for (const BenchCase& c : cases) {
    if (!seen.insert(c.case_id).second) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       "manifest: duplicate case_id " + c.case_id);
    }
  }
}

std::vector<BenchCase> ParseOwaspExpected(
    const std::vector<std::pair<int, std::vector<std::string>>>& records,
    const fs::path& root) {
  static const char* kTestcodeDir = "src/main/java/org/owasp/benchmark/testcode";
  std::vector<BenchCase> cases;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [line, f] = records[r];
    if (!f.empty() && Trim(f[0]).starts_with("#")) continue;
    if (f.size() < 4) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       "manifest line " + std::to_string(line) +
                           ": expected test name, category, real vulnerability, cwe",
                       line);
    }
    BenchCase c;
    c.case_id = std::string(Trim(f[0]));
    auto label = ParseBool(f[2]);
    if (c.case_id.empty() || !label) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       "manifest line " + std::to_string(line) + ": bad test name or label",
                       line);
    }
    c.label = *label;
    c.cwe_id = NormalizeCweId(f[3]);
    c.relative_path = c.case_id + ".java";
    if (!fs::exists(root / c.relative_path)) {
      std::string nested = std::string(kTestcodeDir) + "/" + c.case_id + ".java";
      if (fs::exists(root / nested)) c.relative_path = nested;
    }
    c.source = ReadCaseSource(root, c.relative_path, line, c.case_id);
    cases.push_back(std::move(c));
  }
  return cases;
}

std::string SafeFileName(std::string_view id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
  return out;
}

void WriteFile(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path.filename().string());
}

}  // namespace

std::string_view VariantName(Variant v) {
  return v == Variant::kOriginal ? "original" : "obfuscated";
}

std::optional<Variant> ParseVariant(std::string_view text) {
  std::string lower = ToLower(text);
  if (lower == "original") return Variant::kOriginal;
  if (lower == "obfuscated") return Variant::kObfuscated;
  return std::nullopt;
}

std::vector<BenchCase> ParseCorpus(std::string_view manifest_text,
                                   const fs::path& source_root) {
  auto records = ParseCsv(manifest_text);
  if (records.empty()) return {};
  const auto& header = records.front().second;
  if (!header.empty() && Trim(header[0]).starts_with("#")) {
    auto cases = ParseOwaspExpected(records, source_root);
    CheckUnique(cases);
    return cases;
  }

  std::map<std::string, size_t> column;
  for (size_t i = 0; i < header.size(); ++i) column[ToLower(Trim(header[i]))] = i;
  for (const char* required : {"case_id", "relative_path", "label", "cwe_id"}) {
    if (!column.count(required)) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       std::string("manifest header lacks column ") + required, 1);
    }
  }
  std::vector<BenchCase> cases;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [line, f] = records[r];
    auto cell = [&](const char* name) -> std::string {
      size_t idx = column.at(name);
      if (idx >= f.size()) {
        throw BenchError(BenchError::Kind::kManifestParse,
                         "manifest line " + std::to_string(line) + ": missing " + name,
                         line);
      }
      return std::string(Trim(f[idx]));
    };
    BenchCase c;
    c.case_id = cell("case_id");
    c.relative_path = cell("relative_path");
    if (c.case_id.empty() || c.relative_path.empty()) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       "manifest line " + std::to_string(line) + ": empty case_id or path",
                       line);
    }
    auto label = ParseBool(cell("label"));
    if (!label) {
      throw BenchError(BenchError::Kind::kManifestParse,
                       "manifest line " + std::to_string(line) + ": label must be true or false",
                       line);
    }
    c.label = *label;
    c.cwe_id = NormalizeCweId(cell("cwe_id"));
    c.source = ReadCaseSource(source_root, c.relative_path, line, c.case_id);
    cases.push_back(std::move(c));
  }
  CheckUnique(cases);
  return cases;
}

std::vector<BenchCase> LoadCorpus(const fs::path& manifest, const fs::path& source_root) {
  auto text = ReadFileBytes(manifest);
  if (!text) {
    throw BenchError(BenchError::Kind::kManifestParse,
                     "cannot read manifest " + manifest.filename().string());
  }
  return ParseCorpus(*text, source_root);
}

std::vector<BenchCase> MakeVariant(const std::vector<BenchCase>& corpus, Variant variant,
                                   uint64_t seed, const IdentifierSet& protected_names) {
  std::vector<BenchCase> out = corpus;
  for (BenchCase& c : out) {
    if (variant == Variant::kObfuscated && c.variant == Variant::kOriginal) {
      c.source = ObfuscateSource(c.source, protected_names, seed).text;
    }
    c.variant = variant;
  }
  return out;
}

ParsedVerdict ParseVerdict(std::string_view raw) {
  static const std::regex kVerdict(R"(^[\s*_`>#-]*verdict\s*:?\s*[*_`]*\s*(yes|no)\b)",
                                   std::regex::icase);
  static const std::regex kCwe(R"(\bcwe\s*:\s*[*_`]*\s*(cwe-[0-9]+))", std::regex::icase);

  ParsedVerdict out;
  std::vector<std::string> lines = SplitLines(raw);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::smatch m;
    if (std::regex_search(*it, m, kVerdict)) {
      out.parse_ok = true;
      out.predicted = ToLower(m[1].str()) == "yes";
      break;
    }
  }
  if (!out.parse_ok) return out;
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    std::smatch m;
    if (std::regex_search(*it, m, kCwe)) {
      std::string id = m[1].str();
      for (char& c : id) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out.predicted_cwe = id;
      break;
    }
  }
  return out;
}

ChatRequest BuildDetectionRequest(const BenchCase& c, const BenchRunConfig& config) {
  PromptBundle bundle =
      RenderDetectionPrompt(c.source, config.strategy, config.examples, config.templates);
  ChatRequest request;
  request.model_id = config.model_id;
  request.messages = {{ChatRole::kSystem, bundle.system_text},
                      {ChatRole::kUser, bundle.user_text}};
  request.temperature = config.temperature;
  request.max_output_tokens = config.max_output_tokens;
  request.request_tag = c.case_id;
  return request;
}

std::vector<Verdict> RunBenchmark(const std::vector<BenchCase>& corpus,
                                  const LlmGateway& gateway, const BenchRunConfig& config) {
  std::vector<BenchCase> cases = MakeVariant(corpus, config.variant, config.obfuscation_seed);
  std::vector<ChatRequest> requests;
  requests.reserve(cases.size());
  for (const BenchCase& c : cases) requests.push_back(BuildDetectionRequest(c, config));

  std::vector<BatchResult> results =
      gateway.CompleteBatch(requests, std::max<size_t>(1, config.parallelism));

  std::vector<Verdict> verdicts;
  verdicts.reserve(cases.size());
  for (size_t i = 0; i < cases.size(); ++i) {
    Verdict v;
    v.case_id = cases[i].case_id;
    if (results[i].ok()) {
      v.raw_response = results[i].response->content;
      ParsedVerdict parsed = ParseVerdict(v.raw_response);
      v.predicted = parsed.predicted;
      v.predicted_cwe = parsed.predicted_cwe;
      v.parse_ok = parsed.parse_ok;
    } else {
      v.error = std::string(GatewayErrorKindName(results[i].error->kind())) + ": " +
                results[i].error->what();
    }
    verdicts.push_back(std::move(v));
  }

  if (config.run_dir) {
    const fs::path& dir = *config.run_dir;
    fs::create_directories(dir / "responses");
    nlohmann::json manifest_cases = nlohmann::json::array();
    for (size_t i = 0; i < verdicts.size(); ++i) {
      const Verdict& v = verdicts[i];
      std::string file = "responses/" + SafeFileName(v.case_id) + ".txt";
      WriteFile(dir / file, v.raw_response);
      if (config.variant == Variant::kObfuscated) {
        fs::create_directories(dir / "sources");
        WriteFile(dir / "sources" / (SafeFileName(v.case_id) + ".java"), cases[i].source);
      }
      nlohmann::json entry = {{"case_id", v.case_id},
                              {"label", cases[i].label},
                              {"predicted", v.predicted},
                              {"predicted_cwe", nullptr},
                              {"parse_ok", v.parse_ok},
                              {"response_file", file},
                              {"error", nullptr}};
      if (v.predicted_cwe) entry["predicted_cwe"] = *v.predicted_cwe;
      if (v.error) entry["error"] = *v.error;
      manifest_cases.push_back(std::move(entry));
    }
    nlohmann::json manifest = {
        {"model_id", config.model_id},
        {"strategy", PromptStrategyName(config.strategy)},
        {"variant", VariantName(config.variant)},
        {"provider_mode", gateway.provider_mode()},
        {"template_version", config.templates.version},
        {"temperature", config.temperature},
        {"obfuscation_seed", config.obfuscation_seed},
        {"case_count", verdicts.size()},
        {"cases", std::move(manifest_cases)}};
    WriteFile(dir / "run-manifest.json", manifest.dump(2) + "\n");
  }
  return verdicts;
}

ConfusionCounts Score(const std::vector<Verdict>& verdicts,
                      const std::vector<BenchCase>& corpus) {
  std::map<std::string_view, bool> labels;
  for (const BenchCase& c : corpus) labels.emplace(c.case_id, c.label);
  if (labels.size() != verdicts.size()) {
    throw BenchError(BenchError::Kind::kCaseMismatch,
                     "score: " + std::to_string(verdicts.size()) + " verdicts for " +
                         std::to_string(labels.size()) + " cases");
  }
  ConfusionCounts counts;
  std::set<std::string_view> seen;
  for (const Verdict& v : verdicts) {
    auto it = labels.find(v.case_id);
    if (it == labels.end() || !seen.insert(v.case_id).second) {
      throw BenchError(BenchError::Kind::kCaseMismatch,
                       "score: verdict " + v.case_id + " does not match a corpus case");
    }
    const bool label = it->second;
    if (v.predicted) {
      (label ? counts.tp : counts.fp)++;
    } else {
      (label ? counts.fn : counts.tn)++;
    }
  }
  return counts;
}

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Metrics ComputeMetrics(const ConfusionCounts& counts) {
  Metrics m;
  const int predicted_positive = counts.tp + counts.fp;
  const int actual_positive = counts.tp + counts.fn;
  m.precision_undefined = predicted_positive == 0;
  m.recall_undefined = actual_positive == 0;
  m.precision = m.precision_undefined ? 0.0
                                      : static_cast<double>(counts.tp) / predicted_positive;
  m.recall = m.recall_undefined ? 0.0 : static_cast<double>(counts.tp) / actual_positive;
  m.f1 = F1Score(m.precision, m.recall);
  return m;
}

std::string FormatRounded(double value) {
  // The epsilon absorbs binary representation error, so 0.745 rounds up.
  double scaled = std::floor(value * 100.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", scaled / 100.0);
  return buf;
}

std::string EmitReport(const std::vector<MetricRow>& rows, ReportFormat format) {
  struct Line {
    std::string model_id;
    std::string strategy;
    std::optional<Metrics> original;
    std::optional<Metrics> obfuscated;
  };
  std::map<std::pair<std::string, std::string>, Line> grouped;
  for (const MetricRow& r : rows) {
    std::string strategy(PromptStrategyName(r.strategy));
    Line& line = grouped[{r.model_id, strategy}];
    line.model_id = r.model_id;
    line.strategy = strategy;
    (r.variant == Variant::kOriginal ? line.original : line.obfuscated) = r.metrics;
  }
  std::vector<Line> lines;
  for (auto& [key, line] : grouped) lines.push_back(std::move(line));
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.original.has_value() != b.original.has_value()) return a.original.has_value();
    if (a.original && b.original && a.original->f1 != b.original->f1) {
      return a.original->f1 > b.original->f1;
    }
    return false;  // map order (model, strategy) breaks ties
  });

  auto cells = [](const std::optional<Metrics>& m) {
    if (!m) return std::vector<std::string>{"-", "-", "-"};
    return std::vector<std::string>{FormatRounded(m->precision), FormatRounded(m->recall),
                                    FormatRounded(m->f1)};
  };

  std::ostringstream out;
  if (format == ReportFormat::kMarkdown) {
    out << "| Model | Strategy | Original P | Original R | Original F1 "
           "| Obfuscated P | Obfuscated R | Obfuscated F1 |\n";
    out << "|---|---|---:|---:|---:|---:|---:|---:|\n";
    for (const Line& line : lines) {
      out << "| " << line.model_id << " | " << line.strategy;
      for (const auto& c : cells(line.original)) out << " | " << c;
      for (const auto& c : cells(line.obfuscated)) out << " | " << c;
      out << " |\n";
    }
  } else {
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      return q + "\"";
    };
    out << "model,strategy,original_p,original_r,original_f1,"
           "obfuscated_p,obfuscated_r,obfuscated_f1\n";
    for (const Line& line : lines) {
      out << quote(line.model_id) << ',' << line.strategy;
      for (const auto& c : cells(line.original)) out << ',' << c;
      for (const auto& c : cells(line.obfuscated)) out << ',' << c;
      out << '\n';
    }
  }
  return out.str();
}

ScriptedProvider::Script OracleScript(const std::vector<BenchCase>& corpus,
                                      const std::set<std::string>& flipped) {
  std::map<std::string, std::pair<bool, std::string>> answers;
  for (const BenchCase& c : corpus) {
    answers[c.case_id] = {c.label != (flipped.count(c.case_id) > 0), c.cwe_id};
  }
  return [answers = std::move(answers)](const ChatRequest& request) -> std::string {
    auto it = answers.find(request.request_tag);
    if (it == answers.end()) {
      throw GatewayError(GatewayError::Kind::kProvider,
                         "oracle has no answer for " + request.request_tag);
    }
    if (!it->second.first) return "VERDICT: NO";
    std::string answer = "VERDICT: YES";
    if (!it->second.second.empty()) answer += "\nCWE: " + it->second.second;
    return answer;
  };
}

}  // namespace vulnexp
