#include "vlp/types.hpp"

#include <algorithm>
#include <set>

namespace vlp {

const char* to_string(Provenance p) {
  return p == Provenance::original ? "original" : "generated";
}

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::vision_language: return "vision_language";
    case TaskKind::vision_only: return "vision_only";
    case TaskKind::language_only: return "language_only";
  }
  return "vision_language";
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "vision_language") return TaskKind::vision_language;
  if (s == "vision_only") return TaskKind::vision_only;
  if (s == "language_only") return TaskKind::language_only;
  throw ConfigError("unknown task kind: " + s);
}

const char* to_string(SynthesizedSide s) {
  switch (s) {
    case SynthesizedSide::none: return "none";
    case SynthesizedSide::vision_synthesized: return "vision_synthesized";
    case SynthesizedSide::language_synthesized: return "language_synthesized";
  }
  return "none";
}

int FrameSet::last_temporal_index() const {
  return frames.empty() ? -1 : frames.back().temporal_index;
}

FrameSet FrameSet::of(std::vector<Frame> frames) {
  std::stable_sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) {
    if (a.temporal_index != b.temporal_index) return a.temporal_index < b.temporal_index;
    return a.provenance < b.provenance;  // originals first
  });
  std::set<int> seen;
  for (const Frame& f : frames) {
    if (f.temporal_index < 0)
      throw Error("frame temporal_index must be >= 0, got " + std::to_string(f.temporal_index));
    if (!seen.insert(f.temporal_index).second)
      throw Error("duplicate temporal_index " + std::to_string(f.temporal_index) + " in frame set");
    const bool generated = f.provenance == Provenance::generated;
    if (generated != f.generator_id.has_value())
      throw Error("generator_id must be present exactly when provenance is generated");
  }
  return FrameSet{std::move(frames)};
}

std::string Query::language_input() const {
  if (context.empty()) return text;
  std::string out = "Context: " + context;
  if (!text.empty()) out += "\n" + text;
  return out;
}

void Query::validate() const {
  if (options) {
    if (options->size() < 2 || options->size() > 5)
      throw Error("MCQ options must have 2-5 entries, got " + std::to_string(options->size()));
    for (const auto& o : *options)
      if (o.empty()) throw Error("MCQ option text must be nonempty");
  }
  if (ground_truth && std::holds_alternative<int>(*ground_truth)) {
    const int idx = std::get<int>(*ground_truth);
    if (!options) throw Error("option-index ground truth requires options");
    if (idx < 0 || idx >= static_cast<int>(options->size()))
      throw Error("ground-truth option index " + std::to_string(idx) + " out of range");
  }
}

}  // namespace vlp
