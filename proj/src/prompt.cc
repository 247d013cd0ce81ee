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

#include "vulnexp/prompt.h"

#include <regex>
#include <set>

#include "vulnexp/assets.h"
#include "vulnexp/util.h"

namespace vulnexp {

namespace {

constexpr std::string_view kTemplateFiles[] = {
    "answer_format.txt",
    "detection_cot.txt",
    "detection_example.txt",
    "detection_few_shot.txt",
    "detection_system.txt",
    "detection_zero_shot.txt",
    "explanation_guidelines.txt",
    "explanation_system.txt",
    "explanation_user.txt",
    "explanation_user_advanced.txt",
    "explanation_user_beginner.txt",
    "explanation_user_intermediate.txt",
    "validation_sentence.txt",
};

const std::regex& PlaceholderPattern() {
  static const std::regex kPattern(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  return kPattern;
}

void MergeReport(std::vector<PlaceholderStatus>& into,
                 const std::vector<PlaceholderStatus>& from) {
  for (const auto& s : from) {
    bool present = false;
    for (auto& existing : into) {
      if (existing.name == s.name) {
        existing.resolved = existing.resolved && s.resolved;
        present = true;
      }
    }
    if (!present) into.push_back(s);
  }
}

std::string LocationLabel(const CodeLocation& loc) {
  return loc.file_uri + ":" + std::to_string(loc.start_line);
}

std::string CatalogContextLine(const Finding& finding) {
  std::string line = "Security catalogs: ";
  if (finding.cwe) {
    line += finding.cwe->cwe_id;
    if (!finding.cwe->name.empty()) line += " " + finding.cwe->name;
  } else {
    line += "no CWE mapping";
  }
  line += "; critical methods: ";
  if (finding.critical_methods.empty()) {
    line += "none";
  } else {
    for (size_t i = 0; i < finding.critical_methods.size(); ++i) {
      const auto& m = finding.critical_methods[i];
      if (i > 0) line += ", ";
      line += m.qualified_name + " (" + std::string(MethodCategoryName(m.category)) + ")";
    }
  }
  return line;
}

}  // namespace

std::string_view ExperienceLevelName(ExperienceLevel level) {
  switch (level) {
    case ExperienceLevel::kBeginner: return "beginner";
    case ExperienceLevel::kIntermediate: return "intermediate";
    case ExperienceLevel::kAdvanced: return "advanced";
  }
  return "beginner";
}

std::optional<ExperienceLevel> ParseExperienceLevel(std::string_view text) {
  const std::string lower = ToLower(Trim(text));
  if (lower == "beginner") return ExperienceLevel::kBeginner;
  if (lower == "intermediate") return ExperienceLevel::kIntermediate;
  if (lower == "advanced") return ExperienceLevel::kAdvanced;
  return std::nullopt;
}

std::string_view PromptStrategyName(PromptStrategy strategy) {
  switch (strategy) {
    case PromptStrategy::kZeroShot: return "zero-shot";
    case PromptStrategy::kFewShot: return "few-shot";
    case PromptStrategy::kChainOfThought: return "cot";
  }
  return "zero-shot";
}

std::optional<PromptStrategy> ParsePromptStrategy(std::string_view text) {
  const std::string lower = ToLower(Trim(text));
  if (lower == "zero-shot" || lower == "zeroshot") return PromptStrategy::kZeroShot;
  if (lower == "few-shot" || lower == "fewshot") return PromptStrategy::kFewShot;
  if (lower == "cot" || lower == "chain-of-thought") {
    return PromptStrategy::kChainOfThought;
  }
  return std::nullopt;
}

const TemplateSet& TemplateSet::Builtin() {
  static const TemplateSet kBuiltin = [] {
    TemplateSet set;
    for (auto name : kTemplateFiles) {
      set.files.emplace(name, std::string(assets::get("templates/" + std::string(name))));
    }
    set.RecomputeVersion();
    return set;
  }();
  return kBuiltin;
}

TemplateSet TemplateSet::LoadDirectory(const std::filesystem::path& dir) {
  TemplateSet set = Builtin();
  for (auto name : kTemplateFiles) {
    if (auto text = ReadFileBytes(dir / std::string(name))) {
      set.files[std::string(name)] = std::move(*text);
    }
  }
  set.RecomputeVersion();
  return set;
}

const std::string& TemplateSet::Get(std::string_view name) const {
  auto it = files.find(name);
  if (it == files.end()) {
    throw PromptError(PromptError::Kind::kUnresolvedPlaceholder,
                      "missing template " + std::string(name));
  }
  return it->second;
}

void TemplateSet::RecomputeVersion() {
  std::string material;
  for (const auto& [name, text] : files) {
    material += name;
    material += '\0';
    material += std::to_string(text.size());
    material += '\0';
    material += text;
  }
  version = Sha256Hex(material).substr(0, 12);
}

int SectionWordLimit(ExperienceLevel level) {
  return level == ExperienceLevel::kBeginner ? 160 : 220;
}

std::string FillTemplate(std::string_view tpl,
                         const std::map<std::string, std::string>& values,
                         std::vector<PlaceholderStatus>* report) {
  const std::string text(tpl);
  std::string out;
  std::vector<PlaceholderStatus> local;
  size_t last = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(),
                                      PlaceholderPattern());
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const std::string name = m[1].str();
    out.append(text, last, static_cast<size_t>(m.position(0)) - last);
    last = static_cast<size_t>(m.position(0) + m.length(0));
    auto value = values.find(name);
    MergeReport(local, {{name, value != values.end()}});
    if (value == values.end()) {
      throw PromptError(PromptError::Kind::kUnresolvedPlaceholder,
                        "template placeholder {" + name + "} has no value");
    }
    out += value->second;
  }
  out.append(text, last);
  if (report != nullptr) MergeReport(*report, local);
  return out;
}

bool HasUnresolvedPlaceholder(std::string_view text) {
  const std::string s(text);
  return std::regex_search(s, PlaceholderPattern());
}

std::string FormatDataFlow(const std::optional<DataFlow>& flow) {
  if (!flow) return "not available";
  std::string out;
  auto add = [&](std::string_view role, const FlowStep& step) {
    if (!out.empty()) out += '\n';
    out += role;
    out += " (";
    out += LocationLabel(step.location);
    out += "): ";
    out += step.snippet.empty() ? "<source unavailable>" : step.snippet;
  };
  add("Source", flow->source);
  for (const auto& step : flow->intermediates) add("Intermediate", step);
  add("Sink", flow->sink);
  return out;
}

PromptBundle RenderExplanationPrompt(const Finding& finding,
                                     ExperienceLevel level,
                                     const ExplanationPromptOptions& options,
                                     const TemplateSet& templates) {
  PromptBundle bundle;
  bundle.strategy = PromptStrategy::kZeroShot;
  bundle.template_version = templates.version;

  const std::string guidelines = FillTemplate(
      templates.Get("explanation_guidelines.txt"),
      {{"word_limit", std::to_string(SectionWordLimit(level))}},
      &bundle.placeholder_report);
  bundle.system_text =
      FillTemplate(templates.Get("explanation_system.txt"),
                   {{"guidelines", guidelines}}, &bundle.placeholder_report);

  const bool available = finding.context.mode != ExtractionMode::kUnavailable;
  std::string location = available ? finding.context.enclosing_source
                                   : std::string("not available");
  if (available && finding.context.truncated) {
    location += "\n(snippet truncated to lines " +
                std::to_string(finding.context.window_start_line) + "-" +
                std::to_string(finding.context.window_end_line) + ")";
  }
  const std::string location_line =
      available ? std::to_string(finding.context.flagged_line_number) + ": " +
                      std::string(Trim(finding.context.flagged_line_text))
                : std::string("not available");

  const std::string user_template =
      options.per_level_templates
          ? "explanation_user_" + std::string(ExperienceLevelName(level)) + ".txt"
          : std::string("explanation_user.txt");
  bundle.user_text = FillTemplate(
      templates.Get(user_template),
      {{"level", std::string(ExperienceLevelName(level))},
       {"rule_name", finding.rule_name},
       {"rule_message", finding.message},
       {"location", location},
       {"location_line", location_line},
       {"data_flow", FormatDataFlow(finding.data_flow)}},
      &bundle.placeholder_report);
  if (options.include_catalog_context) {
    bundle.user_text += "\n" + CatalogContextLine(finding);
  }
  if (options.validate) {
    bundle.user_text += "\n" + templates.Get("validation_sentence.txt");
  }
  return bundle;
}

PromptBundle RenderDetectionPrompt(std::string_view code,
                                   PromptStrategy strategy,
                                   std::span<const FewShotExample> examples,
                                   const TemplateSet& templates) {
  PromptBundle bundle;
  bundle.strategy = strategy;
  bundle.template_version = templates.version;
  bundle.system_text = FillTemplate(templates.Get("detection_system.txt"), {},
                                    &bundle.placeholder_report);
  const std::string& answer_format = templates.Get("answer_format.txt");

  switch (strategy) {
    case PromptStrategy::kZeroShot:
      bundle.user_text = FillTemplate(
          templates.Get("detection_zero_shot.txt"),
          {{"code", std::string(code)}, {"answer_format", answer_format}},
          &bundle.placeholder_report);
      break;
    case PromptStrategy::kChainOfThought:
      bundle.user_text = FillTemplate(
          templates.Get("detection_cot.txt"),
          {{"code", std::string(code)}, {"answer_format", answer_format}},
          &bundle.placeholder_report);
      break;
    case PromptStrategy::kFewShot: {
      if (examples.empty()) {
        throw PromptError(PromptError::Kind::kMissingExamples,
                          "few-shot prompting needs at least one example");
      }
      std::string blocks;
      for (size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        std::string answer;
        if (!ex.rationale.empty()) answer += "Reasoning: " + ex.rationale + "\n";
        answer += ex.label ? "VERDICT: YES" : "VERDICT: NO";
        if (ex.label && ex.cwe_id) answer += "\nCWE: " + *ex.cwe_id;
        if (i > 0) blocks += "\n\n";
        blocks += FillTemplate(templates.Get("detection_example.txt"),
                               {{"index", std::to_string(i + 1)},
                                {"code", ex.code},
                                {"answer", answer}},
                               &bundle.placeholder_report);
      }
      bundle.user_text = FillTemplate(
          templates.Get("detection_few_shot.txt"),
          {{"examples", blocks},
           {"code", std::string(code)},
           {"answer_format", answer_format}},
          &bundle.placeholder_report);
      break;
    }
  }
  return bundle;
}

std::vector<FewShotExample> ParseFewShotExamples(std::string_view json_text) {
  std::vector<FewShotExample> out;
  const auto root = nlohmann::json::parse(json_text);
  if (!root.is_array()) {
    throw PromptError(PromptError::Kind::kInvalidExample,
                      "few-shot examples must be a JSON array");
  }
  for (const auto& e : root) {
    FewShotExample ex;
    ex.code = e.value("code", "");
    if (ex.code.empty()) {
      throw PromptError(PromptError::Kind::kInvalidExample,
                        "few-shot example with empty code");
    }
    ex.label = e.value("label", false);
    if (e.contains("cwe_id") && e["cwe_id"].is_string()) {
      ex.cwe_id = e["cwe_id"].get<std::string>();
    }
    ex.rationale = e.value("rationale", "");
    out.push_back(std::move(ex));
  }
  return out;
}

const std::vector<FewShotExample>& DefaultFewShotExamples() {
  static const std::vector<FewShotExample> kExamples =
      ParseFewShotExamples(assets::get("fewshot_examples.json"));
  return kExamples;
}

}  // namespace vulnexp
