#pragma once
#include <map>
#include <optional>
#include <string>

namespace blicket {

struct PromptTemplate {
    std::string name;
    std::string body;
};

enum class SystemMessageVariant { HumanDefault, HumanConjunctive, MathDefinition };
enum class PromptingStyle { Default, React, Reflexion, Cot };

std::string system_variant_name(SystemMessageVariant v);
std::optional<SystemMessageVariant> system_variant_from_name(const std::string& name);
std::string prompting_style_name(PromptingStyle s);
std::optional<PromptingStyle> prompting_style_from_name(const std::string& name);

// Directory holding the prompt data files: the BLICKET_DATA_DIR environment
// variable when set, else the build-time default.
std::string data_dir();

// Loaded from data files and verified against embedded content hashes, so
// template drift fails loudly.
PromptTemplate load_system_template(SystemMessageVariant v);
PromptTemplate load_style_template(PromptingStyle s);

// Hypothesis-sampling prompts (generation, action selection, Q&A).
PromptTemplate sampling_generation_template();
PromptTemplate sampling_action_template();
PromptTemplate sampling_qa_template();

// Replaces #NAME# tokens and the named bracket slots ([HISTORICAL
// OBSERVATIONS], [ELIMINATED HYPOTHESES], [ACTIVE HYPOTHESES],
// [OBSERVATIONS SO FAR], [QUESTION]). Every placeholder present in the body
// must be bound (TemplateError lists the missing ones); unused bindings are
// ignored.
std::string instantiate_prompt(const PromptTemplate& tmpl,
                               const std::map<std::string, std::string>& bindings);

}
