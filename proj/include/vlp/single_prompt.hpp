#pragma once

#include "vlp/language_planning.hpp"
#include "vlp/vision_planning.hpp"

namespace vlp {

// Single-prompt assembly for instruction-strong models (GPT4-V style):
// the whole plan folded into one message instead of the multi-round
// conversation. Pass-through only; nothing in the engine consumes its
// reply.
Message assemble_single_prompt(const NormalizedInput& input,
                               const std::optional<VisionPlan>& vplan,
                               const std::optional<LanguagePlan>& lplan,
                               const PromptTemplates& prompts);

}  // namespace vlp
