#pragma once

#include "vlp/backend.hpp"
#include "vlp/prompts.hpp"
#include "vlp/trace.hpp"
#include "vlp/types.hpp"

namespace vlp {

enum class CsDecision { future_relevant, not_future_relevant, disabled };
enum class SelectionPolicy { union_topk, augment };

const char* to_string(CsDecision d);
const char* to_string(SelectionPolicy p);
SelectionPolicy selection_policy_from_string(const std::string& s);

struct ScoredFrame {
  Frame frame;
  double score = 0.0;  // in [0,1]
};

// The selected frame set the decision maker sees. Frames are in strictly
// increasing temporal order; scores align 1:1 with frames.
struct VisionPlan {
  std::vector<Frame> frames;
  std::vector<double> scores;
  CsDecision cs_decision = CsDecision::disabled;
  SelectionPolicy policy = SelectionPolicy::augment;
  int k = 1;
  int k_g = 1;

  bool has_generated() const;
  std::vector<int> frame_indices() const;
};

// Generator pair: image-to-video serves single-image inputs, video
// prediction serves multi-frame inputs. Both may point at one backend.
struct VideoGenerators {
  Backend* image_to_video = nullptr;
  Backend* video_prediction = nullptr;
};

// One video_gen call producing exactly n future frames whose temporal
// indices continue after the input. Routing: image_to_video when N == 1,
// video_prediction when N > 1.
FrameSet generate_future_frames(const FrameSet& input, int n, const VideoGenerators& generators,
                                Trace* trace = nullptr);

// Asks whether the question concerns potential future actions or states;
// true iff the reply, lowercased and trimmed, begins with "yes".
// Ambiguous replies resolve to false (conservative routing).
bool coarse_select(const Query& query, Backend& llm, const PromptTemplates& prompts,
                   Trace* trace = nullptr);

// One frame_score call; score = probability of the "Yes" token.
ScoredFrame score_frame(const Frame& frame, const Query& query, Backend& scorer,
                        const PromptTemplates& prompts, Trace* trace = nullptr);

// min(k, |candidates|) highest-scoring frames. Ties break toward lower
// temporal_index, then original provenance, then image_ref; the result is
// re-sorted into temporal order.
std::vector<Frame> fine_select(const std::vector<ScoredFrame>& candidates, int k);

struct VisionPlanConfig {
  bool enable_cs = true;
  bool enable_fs = true;
  SelectionPolicy policy = SelectionPolicy::augment;
  int k = 4;            // union_topk budget
  int k_g = 1;          // augment budget for generated frames
  int n_generated = 1;  // frames requested from the generator
};

struct VisionPlanBackends {
  Backend* cs_llm = nullptr;
  VideoGenerators generators;
  Backend* scorer = nullptr;
};

// Full vision-planning stage: route through the coarse selector, generate
// future frames when they are wanted (always, when CS is disabled), score
// every candidate when the fine selector is on, and apply the selection
// policy. union_topk selects over originals and generated frames jointly;
// augment keeps every original and adds the top k_g generated frames.
VisionPlan build_vision_plan(const FrameSet& input, const Query& query,
                             const VisionPlanConfig& config, const VisionPlanBackends& backends,
                             const PromptTemplates& prompts, Trace* trace = nullptr);

}  // namespace vlp
