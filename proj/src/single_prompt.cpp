#include "vlp/single_prompt.hpp"

namespace vlp {

Message assemble_single_prompt(const NormalizedInput& input,
                               const std::optional<VisionPlan>& vplan,
                               const std::optional<LanguagePlan>& lplan,
                               const PromptTemplates& prompts) {
  const Query& query = input.language;
  Message m{Role::user, {}};

  m.parts.push_back(text_part(prompts.current_frames_label));
  if (vplan) {
    for (const Frame& f : vplan->frames)
      if (f.provenance == Provenance::original) m.parts.push_back(image_part(f.image_ref));
    if (vplan->has_generated()) {
      m.parts.push_back(text_part(prompts.future_frames_label));
      for (const Frame& f : vplan->frames)
        if (f.provenance == Provenance::generated) m.parts.push_back(image_part(f.image_ref));
    }
  } else {
    for (const Frame& f : input.vision.frames) m.parts.push_back(image_part(f.image_ref));
  }

  std::string text;
  if (lplan && !lplan->steps.empty()) {
    text += "Consider these questions first:\n";
    for (size_t i = 0; i < lplan->steps.size(); ++i)
      text += std::to_string(i + 1) + ". " + lplan->steps[i] + "\n";
  }
  text += render(prompts.answer, {{"question", question_block(prompts, query)},
                                  {"options_block", options_block(prompts, query)}});
  m.parts.push_back(text_part(std::move(text)));
  return m;
}

}  // namespace vlp
