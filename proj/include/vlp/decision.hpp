#pragma once

#include <map>

#include <nlohmann/json.hpp>

#include "vlp/language_planning.hpp"
#include "vlp/vision_planning.hpp"

namespace vlp {

enum class Stage {
  vanilla,
  language,
  vision,
  voted_language,
  voted_vision,
  final_answer,
};

const char* to_string(Stage s);

struct Answer {
  std::string text;
  std::optional<int> option_index;
  Stage stage = Stage::vanilla;
  std::optional<std::vector<std::string>> sub_answers;  // language stage only
  int round = -1;  // index of the producing round in the trace

  bool is_abstention() const { return text.empty() && !option_index; }
  // Identity comparison for voting: same option, or same text when open-ended.
  bool same_answer(const Answer& other) const;
};

// Replay/audit artifact for one item: every backend round, the per-stage
// answers, and the ablation flags that were in force.
struct DecisionTranscript {
  std::string item_id;
  Trace trace;
  std::map<std::string, Answer> answers;  // keyed by stage name
  nlohmann::json config_snapshot;

  nlohmann::json to_json() const;
};

// Option picked from a free-form MCQ reply. Tries, in order: a leading or
// parenthesized option letter, exact option-text containment, then highest
// token overlap at ratio >= 0.6. Absent when nothing matches.
std::optional<int> parse_choice(const std::string& text, const std::vector<std::string>& options);

// One LMM call with the original frames (capped at frame_budget, uniformly
// spaced) and the question. Unparseable MCQ replies become abstentions.
Answer vanilla_answer(const NormalizedInput& input, Backend& lmm, const PromptTemplates& prompts,
                      int frame_budget, Trace* trace = nullptr);

// Sequential conversation: one call per plan step, then a final call
// answering the original question from the step answers. steps+1 calls.
Answer language_answer(const NormalizedInput& input, const LanguagePlan& plan, Backend& lmm,
                       const PromptTemplates& prompts, int frame_budget, Trace* trace = nullptr);

// One LMM call with the vision-plan frames, labeled current / possible
// future in the prompt.
Answer vision_answer(const VisionPlan& plan, const Query& query, Backend& lmm,
                     const PromptTemplates& prompts, Trace* trace = nullptr);

// One LMM call choosing the more valid of two candidates; returns the
// chosen candidate relabeled with result_stage. Agreement short-circuits
// the call unless strict is set; unparseable votes fall back to `a`.
Answer vote(const Answer& a, const Answer& b, const Query& query, Backend& lmm,
            const PromptTemplates& prompts, Stage result_stage, bool strict = false,
            Trace* trace = nullptr);

struct DecisionConfig {
  bool enable_vp = true;
  bool enable_lp = true;
  bool enable_voting = true;
  bool strict_voting = false;  // vote even when candidates agree
  int frame_budget = 4;        // original-frame cap for vanilla/language calls
};

struct DecisionOutcome {
  Answer final;
  std::map<std::string, Answer> answers;
};

// Full protocol: vanilla -> language branch -> vision branch -> pairwise
// votes against vanilla -> final vote. Disabled branches drop exactly
// their calls; failed branches degrade to the survivors; total failure
// yields an abstention with the trace intact.
DecisionOutcome decide(const NormalizedInput& input, const std::optional<VisionPlan>& vplan,
                       const std::optional<LanguagePlan>& lplan, const DecisionConfig& config,
                       Backend& lmm, const PromptTemplates& prompts, Trace* trace = nullptr);

}  // namespace vlp
