#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "vlp/cache.hpp"
#include "vlp/config.hpp"
#include "vlp/core.hpp"
#include "vlp/decision.hpp"
#include "vlp/eval/dataset.hpp"

namespace vlp {

struct RunStats {
  std::size_t items_total = 0;
  std::size_t items_ok = 0;
  std::size_t items_failed = 0;
  std::size_t items_resumed = 0;
  std::uint64_t transport_ops = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::map<std::string, std::uint64_t> backend_calls;  // role -> served calls

  nlohmann::json to_json() const;
};

struct RunResult {
  int exit_code = 0;  // 0 clean, 1 item failures
  RunStats stats;
  std::filesystem::path predictions_path;
};

// Owns the configured backends and executes the per-item flow
// normalize -> plans -> decide over a dataset with bounded concurrency,
// writing one transcript JSON per item plus a predictions JSONL.
// Items with an existing transcript are resumed from it, not re-run.
class PipelineRunner {
 public:
  explicit PipelineRunner(PipelineConfig config);

  RunResult run(const std::filesystem::path& dataset_path, eval::DatasetKind kind,
                const std::filesystem::path& out_dir);

  // Single-item entries; trace/transcript returned for inspection.
  DecisionTranscript run_mcq_item(const eval::McqItem& item);
  DecisionTranscript run_caption_item(const eval::CaptionItem& item);
  DecisionTranscript run_trajectory_item(const eval::TrajectoryItem& item);

  Backend* role(const std::string& name) const;
  const PromptTemplates& prompts() const { return prompts_; }
  RunStats collect_stats() const;

 private:
  DecisionTranscript run_normalized(const std::string& id, const Query& query,
                                    const FrameSet& frames);
  Backend* require_role(const std::string& name) const;
  VideoGenerators generators() const;

  PipelineConfig config_;
  PromptTemplates prompts_;
  std::shared_ptr<DiskCache> cache_;
  std::map<std::string, std::shared_ptr<Backend>> backends_;
  std::map<std::string, std::shared_ptr<CachingBackend>> cached_;  // same keys when cache on
};

// Frames from opaque refs, temporal indices 0..n-1.
FrameSet frames_from_refs(const std::vector<std::string>& refs);

}  // namespace vlp
