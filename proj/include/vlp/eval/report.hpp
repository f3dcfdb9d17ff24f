#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vlp/eval/metrics.hpp"

namespace vlp::eval {

// Aggregated metrics for one evaluation run. Sections are filled per task
// kind; JSON carries raw fractions, markdown renders the usual x100 values.
struct MetricReport {
  std::optional<McqAccuracyReport> accuracy;
  std::vector<std::string> category_order;  // first-appearance order

  std::optional<double> bleu4;
  std::optional<double> cider;
  std::optional<double> meteor;

  std::optional<std::array<double, 4>> rmse_xyz_sum;  // x, y, z, sum
  std::map<double, double> a_sigma;                   // sigma -> fraction

  int count = 0;

  nlohmann::json to_json() const;
  std::string to_markdown() const;
};

}  // namespace vlp::eval
