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

// Command-line front end: every subcommand mirrors an API endpoint or a
// benchmark/obfuscation workflow.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vulnexp/api_server.h"
#include "vulnexp/bench.h"
#include "vulnexp/catalog.h"
#include "vulnexp/config.h"
#include "vulnexp/explanation.h"
#include "vulnexp/obfuscator.h"
#include "vulnexp/sarif.h"
#include "vulnexp/store.h"
#include "vulnexp/util.h"
#include "vulnexp/workbench.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vulnexp;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string store_path;
  std::string provider;  // none | live | replay
  std::string transcript;
  std::string record;
  std::string model;
};

AppConfig ResolveConfig(const GlobalOptions& g) {
  AppConfig config =
      LoadConfig(g.config_path.empty() ? std::nullopt : std::optional<fs::path>(g.config_path));
  if (!g.store_path.empty()) config.store_path = g.store_path;
  if (!g.model.empty()) config.model_id = g.model;
  if (!g.provider.empty()) {
    auto mode = ParseProviderMode(g.provider);
    if (!mode) throw ConfigError("--provider must be none, live, or replay");
    config.provider.mode = *mode;
  }
  if (!g.transcript.empty()) config.provider.transcript = g.transcript;
  if (!g.record.empty()) config.provider.record_transcript = g.record;
  return config;
}

Catalogs ResolveCatalogs(const AppConfig& config) {
  if (config.cwe_catalog.empty() && config.methods_catalog.empty()) return DefaultCatalogs();
  if (config.cwe_catalog.empty() || config.methods_catalog.empty()) {
    throw ConfigError("set both cwe_catalog and methods_catalog, or neither");
  }
  return LoadCatalogs(config.cwe_catalog, config.methods_catalog);
}

ExplanationServiceConfig ServiceConfig(const AppConfig& config) {
  ExplanationServiceConfig sc;
  sc.model_id = config.model_id;
  sc.temperature = config.temperature;
  sc.max_output_tokens = config.max_output_tokens;
  sc.prompt.include_catalog_context = config.include_catalog_context;
  sc.prompt.per_level_templates = config.per_level_templates;
  if (!config.templates_dir.empty()) sc.templates = TemplateSet::LoadDirectory(config.templates_dir);
  return sc;
}

void LogToStderr(std::string_view message) { std::cerr << message << '\n'; }

// Everything a store-backed subcommand needs.
struct Session {
  AppConfig config;
  std::unique_ptr<Store> store;
  std::shared_ptr<ChatProvider> provider;
  std::shared_ptr<LlmGateway> gateway;
  std::unique_ptr<Workbench> workbench;

  explicit Session(const GlobalOptions& g) : config(ResolveConfig(g)) {
    store = Store::Open(config.store_path);
    provider = MakeProvider(config.provider);
    if (provider) {
      gateway = std::make_shared<LlmGateway>(provider);
      gateway->set_log_sink(LogToStderr);
    }
    workbench = std::make_unique<Workbench>(*store, ResolveCatalogs(config), gateway,
                                            ServiceConfig(config));
  }

  // Persists recorded responses when recording was requested.
  void Finish() const {
    if (auto* rec = dynamic_cast<RecordingProvider*>(provider.get())) {
      rec->Save(config.provider.record_transcript);
    }
  }
};

std::string ReadTextFile(const fs::path& path) {
  auto text = ReadFileBytes(path);
  if (!text) throw std::runtime_error("cannot read " + path.string());
  return *text;
}

void WriteTextFile(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::map<Criterion, int> ParseCriteriaArg(const std::string& text) {
  std::map<Criterion, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("criteria use Name=value pairs");
    auto c = ParseCriterion(Trim(std::string_view(item).substr(0, eq)));
    if (!c) throw std::invalid_argument("unknown criterion in '" + item + "'");
    out[*c] = std::stoi(item.substr(eq + 1));
  }
  return out;
}

std::set<std::string> SplitIds(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t(Trim(item));
    if (!t.empty()) out.insert(t);
  }
  return out;
}

ApiServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

// ---------------------------------------------------------------------------
// bench run

struct BenchOptions {
  std::string manifest;
  std::string source_root;
  std::vector<std::string> models;
  std::vector<std::string> strategies{"zero-shot"};
  std::string variant = "original";
  size_t parallelism = 4;
  std::string out;
  std::string format;
  std::string run_dir;
  std::string provider = "oracle";
  std::string flip;
  std::string transcript;
  std::string record;
  std::string examples;
  uint64_t seed = 0;
};

int RunBench(const BenchOptions& o, const GlobalOptions& g) {
  fs::path manifest(o.manifest);
  fs::path root = o.source_root.empty() ? manifest.parent_path() : fs::path(o.source_root);
  std::vector<BenchCase> corpus = LoadCorpus(manifest, root);

  std::shared_ptr<ChatProvider> provider;
  if (o.provider == "oracle") {
    provider = std::make_shared<ScriptedProvider>(OracleScript(corpus, SplitIds(o.flip)), "oracle");
  } else if (o.provider == "always-yes") {
    provider = std::make_shared<ScriptedProvider>(
        [](const ChatRequest&) { return std::string("VERDICT: YES"); }, "always-yes");
  } else {
    GlobalOptions pg = g;
    pg.provider = o.provider;
    if (!o.transcript.empty()) pg.transcript = o.transcript;
    if (!o.record.empty()) pg.record = o.record;
    provider = MakeProvider(ResolveConfig(pg).provider);
    if (!provider) throw ConfigError("bench needs a provider");
  }
  LlmGateway gateway(provider);
  gateway.set_log_sink(LogToStderr);

  std::vector<Variant> variants;
  if (o.variant == "both") {
    variants = {Variant::kOriginal, Variant::kObfuscated};
  } else if (auto v = ParseVariant(o.variant)) {
    variants = {*v};
  } else {
    throw std::invalid_argument("--variant must be original, obfuscated, or both");
  }

  fs::path out(o.out);
  fs::path run_root = o.run_dir.empty() ? fs::path(out.string() + ".run") : fs::path(o.run_dir);
  std::vector<MetricRow> rows;
  for (const std::string& model : o.models) {
    for (const std::string& strategy_name : o.strategies) {
      auto strategy = ParsePromptStrategy(strategy_name);
      if (!strategy) throw std::invalid_argument("unknown strategy " + strategy_name);
      for (Variant variant : variants) {
        BenchRunConfig config;
        config.model_id = model;
        config.strategy = *strategy;
        config.variant = variant;
        config.parallelism = o.parallelism;
        config.obfuscation_seed = o.seed;
        if (!o.examples.empty()) config.examples = ParseFewShotExamples(ReadTextFile(o.examples));
        config.run_dir = run_root / (model + "_" + std::string(PromptStrategyName(*strategy)) +
                                     "_" + std::string(VariantName(variant)));
        std::vector<Verdict> verdicts = RunBenchmark(corpus, gateway, config);
        MetricRow row;
        row.model_id = model;
        row.strategy = *strategy;
        row.variant = variant;
        row.counts = Score(verdicts, corpus);
        row.metrics = ComputeMetrics(row.counts);
        size_t unparsed = 0;
        for (const Verdict& v : verdicts) unparsed += v.parse_ok ? 0 : 1;
        std::cerr << model << ' ' << PromptStrategyName(*strategy) << ' ' << VariantName(variant)
                  << ": tp=" << row.counts.tp << " fp=" << row.counts.fp
                  << " tn=" << row.counts.tn << " fn=" << row.counts.fn
                  << " unparsed=" << unparsed << '\n';
        rows.push_back(row);
      }
    }
  }

  ReportFormat format = ReportFormat::kMarkdown;
  std::string fmt = o.format.empty() ? (out.extension() == ".csv" ? "csv" : "md") : o.format;
  if (fmt == "csv") {
    format = ReportFormat::kCsv;
  } else if (fmt != "md" && fmt != "markdown") {
    throw std::invalid_argument("--format must be md or csv");
  }
  WriteTextFile(out, EmitReport(rows, format));
  if (!o.record.empty()) {
    if (auto* rec = dynamic_cast<RecordingProvider*>(provider.get())) rec->Save(o.record);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain SAST findings with an LLM and benchmark LLM vulnerability detection"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--store", g.store_path, "Store file (overrides config)");
  app.add_option("--provider", g.provider, "LLM provider: none, live, replay");
  app.add_option("--transcript", g.transcript, "Replay transcript (replay provider)");
  app.add_option("--record", g.record, "Save live responses to this transcript");
  app.add_option("--model", g.model, "Model id (overrides config)");

  // import
  auto* import_cmd = app.add_subcommand("import", "Import a SARIF file into the store");
  std::string sarif_path;
  std::string source_root;
  import_cmd->add_option("sarif", sarif_path, "SARIF file")->required()->check(CLI::ExistingFile);
  import_cmd->add_option("--source-root", source_root, "Directory holding the scanned sources");

  // findings
  auto* findings_cmd = app.add_subcommand("findings", "Show a scan's findings or one finding");
  std::string scan_id;
  std::string group = "rule";
  std::string fingerprint;
  auto* scan_opt = findings_cmd->add_option("--scan", scan_id, "Scan id (scan-<n>)");
  findings_cmd->add_option("--group", group, "rule or file")->check(CLI::IsMember({"rule", "file"}));
  auto* fp_opt = findings_cmd->add_option("--fingerprint", fingerprint, "Finding fingerprint");
  scan_opt->excludes(fp_opt);
  findings_cmd->add_flag("--list-scans", "List scans instead");

  // explain
  auto* explain_cmd = app.add_subcommand("explain", "Explain one finding");
  std::string explain_fp;
  std::string level_name = "beginner";
  bool validate = false;
  bool force_refresh = false;
  explain_cmd->add_option("fingerprint", explain_fp, "Finding fingerprint")->required();
  explain_cmd->add_option("--level", level_name, "beginner, intermediate, or advanced");
  explain_cmd->add_flag("--validate", validate, "Ask the model to confirm a true positive first");
  explain_cmd->add_flag("--force-refresh", force_refresh, "Ignore the cache");

  // feedback
  auto* feedback_cmd = app.add_subcommand("feedback", "Record or summarize feedback");
  feedback_cmd->require_subcommand(1);
  auto* fb_add = feedback_cmd->add_subcommand("add", "Record feedback on an explanation");
  std::string fb_fp;
  std::string fb_level = "beginner";
  std::string thumbs;
  std::string criteria;
  std::string comment;
  fb_add->add_option("fingerprint", fb_fp)->required();
  fb_add->add_option("--level", fb_level);
  fb_add->add_option("--thumbs", thumbs, "up or down")->required();
  fb_add->add_option("--criteria", criteria, "Relevant=4,Faithful=5,Concise=3,Coherent=4,Accuracy=5");
  fb_add->add_option("--comment", comment);
  auto* fb_summary = feedback_cmd->add_subcommand("summary", "Rating distribution per criterion");
  std::string summary_level;
  fb_summary->add_option("--level", summary_level);
  auto* fb_export = feedback_cmd->add_subcommand("export", "All explanations and feedback as JSON lines");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "LLM vulnerability-detection benchmark");
  bench_cmd->require_subcommand(1);
  auto* bench_run = bench_cmd->add_subcommand("run", "Run a benchmark and write a scorecard");
  BenchOptions bo;
  bench_run->add_option("--manifest", bo.manifest, "Corpus manifest CSV")->required()->check(CLI::ExistingFile);
  bench_run->add_option("--source-root", bo.source_root, "Defaults to the manifest directory");
  bench_run->add_option("--model", bo.models, "Model id; repeatable")->required();
  bench_run->add_option("--strategy", bo.strategies, "zero-shot, few-shot, cot; repeatable");
  bench_run->add_option("--variant", bo.variant, "original, obfuscated, or both");
  bench_run->add_option("--parallelism", bo.parallelism)->check(CLI::Range(1, 256));
  bench_run->add_option("--out", bo.out, "Report file (.md or .csv)")->required();
  bench_run->add_option("--format", bo.format, "md or csv (default from --out extension)");
  bench_run->add_option("--run-dir", bo.run_dir, "Raw responses (default <out>.run)");
  bench_run->add_option("--bench-provider", bo.provider, "oracle, always-yes, replay, live");
  bench_run->add_option("--flip", bo.flip, "Comma-separated case ids the oracle answers wrongly");
  bench_run->add_option("--bench-transcript", bo.transcript, "Replay transcript");
  bench_run->add_option("--bench-record", bo.record, "Record live responses here");
  bench_run->add_option("--examples", bo.examples, "Few-shot examples JSON");
  bench_run->add_option("--seed", bo.seed, "Obfuscation seed");

  // obfuscate
  auto* obf_cmd = app.add_subcommand("obfuscate", "Rename identifiers in a source tree");
  std::string obf_in;
  std::string obf_out;
  std::vector<std::string> protected_files;
  uint64_t obf_seed = 0;
  obf_cmd->add_option("input", obf_in)->required()->check(CLI::ExistingDirectory);
  obf_cmd->add_option("output", obf_out)->required();
  obf_cmd->add_option("--protected", protected_files, "Extra protected-identifier list; repeatable");
  obf_cmd->add_option("--seed", obf_seed);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  std::string listen;
  std::string ui_dir;
  serve_cmd->add_option("--listen", listen, "host:port (default 127.0.0.1:8777)");
  serve_cmd->add_option("--ui-dir", ui_dir, "Static UI bundle directory");

  // openapi
  auto* openapi_cmd = app.add_subcommand("openapi", "Print the OpenAPI description");
  std::string openapi_out;
  openapi_cmd->add_option("--out", openapi_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*import_cmd) {
      Session s(g);
      ScanRecord r = s.workbench->ImportScan(ReadTextFile(sarif_path),
                                             fs::path(sarif_path).filename().string(), source_root);
      std::cout << json(r).dump(2) << '\n';
    } else if (*findings_cmd) {
      Session s(g);
      if (findings_cmd->count("--list-scans") > 0) {
        std::cout << json(s.workbench->ListScans()).dump(2) << '\n';
      } else if (!fingerprint.empty()) {
        auto f = s.workbench->GetFinding(fingerprint);
        if (!f) throw NotFoundError("unknown finding " + fingerprint);
        std::cout << json(*f).dump(2) << '\n';
      } else {
        if (scan_id.empty()) throw std::invalid_argument("pass --scan, --fingerprint, or --list-scans");
        std::cout << s.workbench->GroupedFindings(scan_id, *ParseGroupBy(group)).dump(2) << '\n';
      }
    } else if (*explain_cmd) {
      auto level = ParseExperienceLevel(level_name);
      if (!level) throw std::invalid_argument("level must be beginner, intermediate, or advanced");
      Session s(g);
      ExplainResult r = s.workbench->Explain(explain_fp, *level, {validate, force_refresh});
      s.Finish();
      std::cerr << (r.cache_hit ? "cache hit" : "cache miss") << '\n';
      std::cout << json(r.explanation).dump(2) << '\n';
    } else if (*fb_add) {
      Feedback f;
      f.finding_fingerprint = fb_fp;
      auto level = ParseExperienceLevel(fb_level);
      auto t = ParseThumbs(thumbs);
      if (!level || !t) throw std::invalid_argument("invalid --level or --thumbs");
      f.level = *level;
      f.thumbs = *t;
      if (!criteria.empty()) f.criteria = ParseCriteriaArg(criteria);
      if (!comment.empty()) f.comment = comment;
      Session s(g);
      std::cout << s.workbench->RecordFeedback(std::move(f)) << '\n';
    } else if (*fb_summary) {
      FeedbackFilter filter;
      if (!summary_level.empty()) {
        filter.level = ParseExperienceLevel(summary_level);
        if (!filter.level) throw std::invalid_argument("invalid --level");
      }
      Session s(g);
      std::cout << SummaryToJson(s.workbench->explanations().SummarizeFeedback(filter)).dump(2)
                << '\n';
    } else if (*fb_export) {
      Session s(g);
      s.workbench->explanations().ExportJsonLines(std::cout);
    } else if (*bench_run) {
      return RunBench(bo, g);
    } else if (*obf_cmd) {
      IdentifierSet names = DefaultProtectedIdentifiers();
      for (const std::string& file : protected_files) {
        IdentifierSet extra = ParseProtectedList(ReadTextFile(file));
        names.insert(extra.begin(), extra.end());
      }
      auto report = ObfuscateDirectory(obf_in, obf_out, names, obf_seed);
      std::cerr << "obfuscated " << report.files_obfuscated << " files, copied "
                << report.files_copied << '\n';
    } else if (*serve_cmd) {
      Session s(g);
      if (!listen.empty()) ParseListen(listen, s.config);
      if (!ui_dir.empty()) s.config.ui_dir = ui_dir;
      ApiServer server(s.workbench.get(),
                       {std::string(ProviderModeName(s.config.provider.mode)), s.config.ui_dir});
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      std::cerr << "listening on " << s.config.listen_host << ':' << s.config.listen_port << '\n';
      bool ok = server.Listen(s.config.listen_host, s.config.listen_port);
      g_server = nullptr;
      s.Finish();
      if (!ok) {
        std::cerr << "error: cannot listen on " << s.config.listen_host << ':'
                  << s.config.listen_port << '\n';
        return 1;
      }
    } else if (*openapi_cmd) {
      std::string doc = OpenApiDocument().dump(2) + "\n";
      if (openapi_out.empty()) {
        std::cout << doc;
      } else {
        WriteTextFile(openapi_out, doc);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
