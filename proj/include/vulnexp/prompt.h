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

#ifndef VULNEXP_PROMPT_H_
#define VULNEXP_PROMPT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vulnexp/finding.h"

namespace vulnexp {

enum class ExperienceLevel { kBeginner, kIntermediate, kAdvanced };

std::string_view ExperienceLevelName(ExperienceLevel level);  // "beginner"
// Case-insensitive; nullopt for anything but the three levels.
std::optional<ExperienceLevel> ParseExperienceLevel(std::string_view text);

enum class PromptStrategy { kZeroShot, kFewShot, kChainOfThought };

std::string_view PromptStrategyName(PromptStrategy strategy);  // "zero-shot"
// Accepts "zero-shot", "few-shot", "cot", "chain-of-thought".
std::optional<PromptStrategy> ParsePromptStrategy(std::string_view text);

struct PlaceholderStatus {
  std::string name;
  bool resolved = false;

  bool operator==(const PlaceholderStatus&) const = default;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  PromptStrategy strategy = PromptStrategy::kZeroShot;
  std::string template_version;
  std::vector<PlaceholderStatus> placeholder_report;

  bool operator==(const PromptBundle&) const = default;
};

struct FewShotExample {
  std::string code;
  bool label = false;  // true when vulnerable
  std::optional<std::string> cwe_id;
  std::string rationale;
};

class PromptError : public std::runtime_error {
 public:
  enum class Kind { kUnresolvedPlaceholder, kMissingExamples, kInvalidExample };

  PromptError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Template texts with `{name}` placeholders. The built-in set is compiled
// from data/templates; a directory may override any subset of the files.
struct TemplateSet {
  std::map<std::string, std::string, std::less<>> files;  // file name -> text
  std::string version;  // content hash over every file

  static const TemplateSet& Builtin();
  // Files present in `dir` replace the built-in text of the same name.
  static TemplateSet LoadDirectory(const std::filesystem::path& dir);

  const std::string& Get(std::string_view name) const;
  void RecomputeVersion();
};

struct ExplanationPromptOptions {
  // Appends the instruction to first confirm the finding is a true positive.
  bool validate = false;
  // Appends a line with the CWE and critical-method annotations.
  bool include_catalog_context = false;
  // Uses explanation_user_<level>.txt instead of the shared user template.
  bool per_level_templates = false;
};

// Per-section word budget stated in the guideline block.
int SectionWordLimit(ExperienceLevel level);

// Role-playing zero-shot explanation prompt for one finding.
// Throws PromptError(kUnresolvedPlaceholder) on a template defect.
PromptBundle RenderExplanationPrompt(
    const Finding& finding, ExperienceLevel level,
    const ExplanationPromptOptions& options = {},
    const TemplateSet& templates = TemplateSet::Builtin());

// Detection prompt for the benchmark. Few-shot requires at least one example
// (PromptError kMissingExamples); other strategies ignore `examples`.
PromptBundle RenderDetectionPrompt(
    std::string_view code, PromptStrategy strategy,
    std::span<const FewShotExample> examples = {},
    const TemplateSet& templates = TemplateSet::Builtin());

// Single-pass `{name}` substitution. Substituted values are not rescanned.
// Every placeholder in `tpl` must have a value.
std::string FillTemplate(std::string_view tpl,
                         const std::map<std::string, std::string>& values,
                         std::vector<PlaceholderStatus>* report = nullptr);

// Whether `text` contains `{identifier}`.
bool HasUnresolvedPlaceholder(std::string_view text);

// Text that replaces the data-flow placeholder.
std::string FormatDataFlow(const std::optional<DataFlow>& flow);

std::vector<FewShotExample> ParseFewShotExamples(std::string_view json_text);
const std::vector<FewShotExample>& DefaultFewShotExamples();

}  // namespace vulnexp

#endif  // VULNEXP_PROMPT_H_
