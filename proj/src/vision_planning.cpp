#include "vlp/vision_planning.hpp"

#include <algorithm>
#include <cctype>

namespace vlp {

namespace {

std::string lower_trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  std::string out = s.substr(b, e - b + 1);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void sort_temporal(std::vector<Frame>& frames) {
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) {
    if (a.temporal_index != b.temporal_index) return a.temporal_index < b.temporal_index;
    if (a.provenance != b.provenance) return a.provenance < b.provenance;
    return a.image_ref < b.image_ref;
  });
}

}  // namespace

const char* to_string(CsDecision d) {
  switch (d) {
    case CsDecision::future_relevant: return "future_relevant";
    case CsDecision::not_future_relevant: return "not_future_relevant";
    case CsDecision::disabled: return "disabled";
  }
  return "disabled";
}

const char* to_string(SelectionPolicy p) {
  return p == SelectionPolicy::union_topk ? "union_topk" : "augment";
}

SelectionPolicy selection_policy_from_string(const std::string& s) {
  if (s == "union_topk") return SelectionPolicy::union_topk;
  if (s == "augment") return SelectionPolicy::augment;
  throw ConfigError("unknown selection policy: " + s);
}

bool VisionPlan::has_generated() const {
  return std::any_of(frames.begin(), frames.end(),
                     [](const Frame& f) { return f.provenance == Provenance::generated; });
}

std::vector<int> VisionPlan::frame_indices() const {
  std::vector<int> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(f.temporal_index);
  return out;
}

FrameSet generate_future_frames(const FrameSet& input, int n, const VideoGenerators& generators,
                                Trace* trace) {
  if (input.size() < 1) throw Error("generate_future_frames requires at least one input frame");
  if (n < 1) throw Error("generate_future_frames requires n >= 1");

  Backend* generator =
      input.size() == 1 ? generators.image_to_video : generators.video_prediction;
  if (!generator)
    throw ConfigError(input.size() == 1 ? "no image-to-video backend bound"
                                        : "no video-prediction backend bound");

  BackendRequest request;
  request.kind = RequestKind::video_gen;
  Message m{Role::user, {}};
  std::vector<int> indices;
  for (const Frame& f : input.frames) {
    m.parts.push_back(image_part(f.image_ref));
    indices.push_back(f.temporal_index);
  }
  request.messages = {std::move(m)};
  request.params["n_frames"] = n;

  const BackendResponse response = dispatch(*generator, request);
  if (trace)
    trace->add("video_gen", cache_key(request), response.payload_summary(), std::move(indices));

  if (static_cast<int>(response.frames->size()) != n)
    throw CountMismatchError("generator returned " + std::to_string(response.frames->size()) +
                             " frames, requested " + std::to_string(n));

  std::vector<Frame> frames;
  int index = input.last_temporal_index();
  for (const std::string& ref : *response.frames)
    frames.push_back(Frame{ref, ++index, Provenance::generated, generator->id()});
  return FrameSet::of(std::move(frames));
}

bool coarse_select(const Query& query, Backend& llm, const PromptTemplates& prompts,
                   Trace* trace) {
  const std::string question = question_block(prompts, query);
  if (question.empty()) throw Error("coarse_select requires a nonempty question");

  BackendRequest request;
  request.kind = RequestKind::text_gen;
  request.messages = {{Role::user, {text_part(render(prompts.cs, {{"question", question}}))}}};

  const BackendResponse response = dispatch(llm, request);
  if (trace) trace->add("cs", cache_key(request), response.payload_summary());

  return lower_trim(response.text.value_or("")).rfind("yes", 0) == 0;
}

ScoredFrame score_frame(const Frame& frame, const Query& query, Backend& scorer,
                        const PromptTemplates& prompts, Trace* trace) {
  BackendRequest request;
  request.kind = RequestKind::frame_score;
  const std::string prompt =
      render(prompts.fs, {{"question", question_block(prompts, query)},
                          {"options_block", options_block(prompts, query)}});
  request.messages = {{Role::user, {image_part(frame.image_ref), text_part(prompt)}}};
  request.params["want_token_scores"] = true;

  const BackendResponse response = dispatch(scorer, request);
  if (trace)
    trace->add("frame_score", cache_key(request), response.payload_summary(),
               {frame.temporal_index});

  return ScoredFrame{frame, score_yes(response)};
}

std::vector<Frame> fine_select(const std::vector<ScoredFrame>& candidates, int k) {
  if (k < 1) throw Error("fine_select requires k >= 1");
  if (candidates.empty()) throw Error("fine_select requires candidates");

  std::vector<ScoredFrame> ranked = candidates;
  std::sort(ranked.begin(), ranked.end(), [](const ScoredFrame& a, const ScoredFrame& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame.temporal_index != b.frame.temporal_index)
      return a.frame.temporal_index < b.frame.temporal_index;
    if (a.frame.provenance != b.frame.provenance) return a.frame.provenance < b.frame.provenance;
    return a.frame.image_ref < b.frame.image_ref;
  });

  const size_t keep = std::min(static_cast<size_t>(k), ranked.size());
  std::vector<Frame> selected;
  selected.reserve(keep);
  for (size_t i = 0; i < keep; ++i) selected.push_back(ranked[i].frame);
  sort_temporal(selected);
  return selected;
}

VisionPlan build_vision_plan(const FrameSet& input, const Query& query,
                             const VisionPlanConfig& config, const VisionPlanBackends& backends,
                             const PromptTemplates& prompts, Trace* trace) {
  if (input.empty()) throw Error("build_vision_plan requires a normalized input with frames");

  VisionPlan plan;
  plan.policy = config.policy;
  plan.k = config.k;
  plan.k_g = config.k_g;

  bool use_generated = true;
  if (config.enable_cs) {
    if (!backends.cs_llm) throw ConfigError("coarse selector enabled but no llm backend bound");
    use_generated = coarse_select(query, *backends.cs_llm, prompts, trace);
    plan.cs_decision =
        use_generated ? CsDecision::future_relevant : CsDecision::not_future_relevant;
  } else {
    plan.cs_decision = CsDecision::disabled;
  }

  std::vector<Frame> candidates = input.frames;
  if (use_generated) {
    const FrameSet generated =
        generate_future_frames(input, config.n_generated, backends.generators, trace);
    candidates.insert(candidates.end(), generated.frames.begin(), generated.frames.end());
  }

  if (!config.enable_fs) {
    plan.frames = candidates;
    sort_temporal(plan.frames);
    plan.scores.assign(plan.frames.size(), 1.0);
    return plan;
  }

  if (!backends.scorer) throw ConfigError("fine selector enabled but no scorer backend bound");
  std::vector<ScoredFrame> scored;
  scored.reserve(candidates.size());
  for (const Frame& f : candidates)
    scored.push_back(score_frame(f, query, *backends.scorer, prompts, trace));

  std::vector<Frame> selected;
  if (config.policy == SelectionPolicy::union_topk) {
    selected = fine_select(scored, config.k);
  } else {
    std::vector<ScoredFrame> generated_only;
    for (const ScoredFrame& s : scored) {
      if (s.frame.provenance == Provenance::original)
        selected.push_back(s.frame);
      else
        generated_only.push_back(s);
    }
    if (!generated_only.empty()) {
      const std::vector<Frame> picked = fine_select(generated_only, config.k_g);
      selected.insert(selected.end(), picked.begin(), picked.end());
    }
    sort_temporal(selected);
  }

  plan.frames = std::move(selected);
  plan.scores.reserve(plan.frames.size());
  for (const Frame& f : plan.frames) {
    const auto it = std::find_if(scored.begin(), scored.end(), [&f](const ScoredFrame& s) {
      return s.frame.temporal_index == f.temporal_index && s.frame.image_ref == f.image_ref;
    });
    plan.scores.push_back(it != scored.end() ? it->score : 0.0);
  }
  return plan;
}

}  // namespace vlp
