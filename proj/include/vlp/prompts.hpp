#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vlp/types.hpp"

namespace vlp {

// Every prompt the engine sends, with {placeholder} substitution. Defaults
// embed the selector and decomposition prompt strings; any entry can be
// overridden by a plain-text file <name>.txt in a template directory.
struct PromptTemplates {
  std::string cs;                 // {question}
  std::string fs;                 // {question}{options_block}
  std::string lp_vision_language; // {question}{count}
  std::string lp_vision_only;
  std::string lp_language_only;
  std::string lp_reprompt;        // {count} word, {n} digits
  std::string vote;               // {question}{candidate_1}{candidate_2}
  std::string answer;             // {question}{options_block}
  std::string language_final;     // {question}{options_block}
  std::string mcq_suffix;         // {options}
  std::string caption_instruction;  // stands in for T_O on vision-only tasks
  std::string v2l;
  std::string l2v;                // {question}
  std::string current_frames_label;
  std::string future_frames_label;

  static PromptTemplates defaults();
  void load_overrides(const std::filesystem::path& dir);

  const std::string& lp_for(TaskKind kind) const;
};

std::string render(const std::string& tpl, const std::map<std::string, std::string>& vars);

// "(A) first\n(B) second" style block; empty string when no options.
std::string format_options(const std::vector<std::string>& options);

// The "\nOptions:...\nAnswer with..." suffix for MCQ queries, else "".
std::string options_block(const PromptTemplates& prompts, const Query& query);

// "Context: ...\n" when the query carries a synthesized description.
std::string context_block(const Query& query);

// The query's own text, or the captioning instruction when it has none.
std::string effective_question(const PromptTemplates& prompts, const Query& query);

// What {question} expands to everywhere: the context block (synthesized
// description, when present) followed by the effective question.
std::string question_block(const PromptTemplates& prompts, const Query& query);

// English number word for prompt templates ("three" for 3).
std::string count_word(int n);

}  // namespace vlp
