#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vlp/errors.hpp"

namespace vlp {

enum class Provenance { original, generated };

// One image reference with a position on the item's timeline. The engine
// never decodes pixels; image_ref is an opaque locator resolved by backends.
struct Frame {
  std::string image_ref;
  int temporal_index = 0;
  Provenance provenance = Provenance::original;
  std::optional<std::string> generator_id;  // present exactly when generated
};

const char* to_string(Provenance p);

// Ordered frame list. N == 1 is an image input, N > 1 a video input.
struct FrameSet {
  std::vector<Frame> frames;

  int size() const { return static_cast<int>(frames.size()); }
  bool empty() const { return frames.empty(); }
  int last_temporal_index() const;

  // Sorts by temporal_index (originals before generated at equal index)
  // and enforces the per-frame invariants.
  static FrameSet of(std::vector<Frame> frames);
};

enum class TaskKind { vision_language, vision_only, language_only };

const char* to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

struct Trajectory {
  std::vector<std::array<double, 3>> points;
};

// Ground truth is task-shaped: an MCQ option index, reference texts for
// captioning, or a gripper trajectory.
using GroundTruth = std::variant<int, std::vector<std::string>, Trajectory>;

// The language side of an item. `text` is the user's original question and
// is never rewritten; a synthesized scene description (V2L) lands in
// `context` and is prepended as a labeled block in downstream prompts.
struct Query {
  std::string text;
  TaskKind task_kind = TaskKind::vision_language;
  std::optional<std::vector<std::string>> options;  // MCQ, 2-5 entries
  std::optional<std::string> category;
  std::optional<GroundTruth> ground_truth;
  std::string context;

  bool is_mcq() const { return options.has_value(); }

  // Context block + original text; what prompt builders consume.
  std::string language_input() const;

  void validate() const;
};

enum class SynthesizedSide { none, vision_synthesized, language_synthesized };

const char* to_string(SynthesizedSide s);

// Post-normalization item: both modalities guaranteed present.
struct NormalizedInput {
  FrameSet vision;
  Query language;
  SynthesizedSide synthesized_side = SynthesizedSide::none;

  bool complete() const {
    return vision.size() >= 1 && !language.language_input().empty();
  }
};

}  // namespace vlp
