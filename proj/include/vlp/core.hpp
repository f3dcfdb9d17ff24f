#pragma once

#include "vlp/backend.hpp"
#include "vlp/prompts.hpp"
#include "vlp/trace.hpp"
#include "vlp/types.hpp"

namespace vlp {

// vision_language iff both modalities present, vision_only for frames
// alone, language_only for text alone. Throws EmptyInputError when both
// sides are absent.
TaskKind classify_task(const std::string& query_text, const FrameSet& frames);

struct NormalizeOptions {
  int l2v_frames = 4;  // frames requested from the language-to-video model
};

// Fills the missing modality so every item carries both a frame set and a
// language input: language-only queries gain frames via one L2V call,
// vision-only queries gain a scene description via one V2L call (stored as
// query context, the original text is never rewritten). Backends are only
// touched for the side being synthesized and may be null otherwise.
NormalizedInput normalize(const Query& query, const FrameSet& frames, Backend* l2v, Backend* v2l,
                          const PromptTemplates& prompts, const NormalizeOptions& options = {},
                          Trace* trace = nullptr);

// Idempotent re-entry: an already-complete input passes through unchanged
// with zero backend calls.
NormalizedInput normalize(const NormalizedInput& input, Backend* l2v, Backend* v2l,
                          const PromptTemplates& prompts, const NormalizeOptions& options = {},
                          Trace* trace = nullptr);

}  // namespace vlp
