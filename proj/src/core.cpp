#include "vlp/core.hpp"

namespace vlp {

TaskKind classify_task(const std::string& query_text, const FrameSet& frames) {
  const bool has_text = !query_text.empty();
  const bool has_frames = frames.size() >= 1;
  if (has_text && has_frames) return TaskKind::vision_language;
  if (has_frames) return TaskKind::vision_only;
  if (has_text) return TaskKind::language_only;
  throw EmptyInputError("query has neither text nor frames");
}

namespace {

FrameSet synthesize_frames(const Query& query, Backend& l2v, const PromptTemplates& prompts,
                           int n_frames, Trace* trace) {
  BackendRequest request;
  request.kind = RequestKind::video_gen;
  request.messages = {{Role::user, {text_part(render(prompts.l2v, {{"question", query.text}}))}}};
  request.params["n_frames"] = n_frames;

  BackendResponse response;
  try {
    response = dispatch(l2v, request);
  } catch (const BackendError&) {
    throw;
  } catch (const Error& e) {
    throw BackendError(e.what(), cache_key(request), to_string(request.kind));
  }
  if (trace) trace->add("l2v", cache_key(request), response.payload_summary());
  if (!response.frames || response.frames->empty())
    throw SynthesisEmptyError("L2V backend returned zero frames");

  std::vector<Frame> frames;
  int index = 0;
  for (const std::string& ref : *response.frames)
    frames.push_back(Frame{ref, index++, Provenance::original, std::nullopt});
  return FrameSet::of(std::move(frames));
}

std::string synthesize_description(const FrameSet& frames, Backend& v2l,
                                   const PromptTemplates& prompts, Trace* trace) {
  BackendRequest request;
  request.kind = RequestKind::text_gen;
  Message m{Role::user, {text_part(prompts.v2l)}};
  std::vector<int> indices;
  for (const Frame& f : frames.frames) {
    m.parts.push_back(image_part(f.image_ref));
    indices.push_back(f.temporal_index);
  }
  request.messages = {std::move(m)};

  BackendResponse response;
  try {
    response = dispatch(v2l, request);
  } catch (const BackendError&) {
    throw;
  } catch (const Error& e) {
    throw BackendError(e.what(), cache_key(request), to_string(request.kind));
  }
  if (trace) trace->add("v2l", cache_key(request), response.payload_summary(), std::move(indices));
  if (!response.text || response.text->empty())
    throw SynthesisEmptyError("V2L backend returned empty text");
  return *response.text;
}

}  // namespace

NormalizedInput normalize(const Query& query, const FrameSet& frames, Backend* l2v, Backend* v2l,
                          const PromptTemplates& prompts, const NormalizeOptions& options,
                          Trace* trace) {
  const TaskKind kind = classify_task(query.text, frames);
  Query language = query;
  language.task_kind = kind;

  switch (kind) {
    case TaskKind::vision_language:
      return NormalizedInput{frames, std::move(language), SynthesizedSide::none};
    case TaskKind::language_only: {
      if (!l2v) throw ConfigError("language_only input requires an l2v backend");
      FrameSet vision = synthesize_frames(language, *l2v, prompts, options.l2v_frames, trace);
      return NormalizedInput{std::move(vision), std::move(language),
                             SynthesizedSide::vision_synthesized};
    }
    case TaskKind::vision_only: {
      if (!v2l) throw ConfigError("vision_only input requires a v2l backend");
      language.context = synthesize_description(frames, *v2l, prompts, trace);
      return NormalizedInput{frames, std::move(language),
                             SynthesizedSide::language_synthesized};
    }
  }
  throw EmptyInputError("unreachable");
}

NormalizedInput normalize(const NormalizedInput& input, Backend* l2v, Backend* v2l,
                          const PromptTemplates& prompts, const NormalizeOptions& options,
                          Trace* trace) {
  if (input.complete()) return input;
  NormalizedInput out =
      normalize(input.language, input.vision, l2v, v2l, prompts, options, trace);
  return out;
}

}  // namespace vlp
