#pragma once

#include <filesystem>

#include "vlp/eval/dataset.hpp"
#include "vlp/eval/report.hpp"

namespace vlp::eval {

struct EvalOptions {
  bool per_item_bleu = false;   // mean of per-item scores instead of corpus
  bool bleu_smoothing = false;  // add-1 on zero higher-order counts
  std::vector<double> sigma_grid = {0.1, 0.5, 1.0, 5.0, 10.0};
};

// Scores a predictions JSONL against a dataset. Id mismatches (missing or
// unknown) are listed exhaustively in the thrown error.
MetricReport evaluate(const std::filesystem::path& predictions_path, const Dataset& dataset,
                      const EvalOptions& options = {});

}  // namespace vlp::eval
