#include "vlp/eval/evaluate.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace vlp::eval {

namespace {

using nlohmann::json;

std::map<std::string, json> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions: " + path.string());
  std::map<std::string, json> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaViolationError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!row.is_object() || !row.contains("id") || !row.at("id").is_string())
      throw SchemaViolationError(line_no, "prediction rows need a string 'id'");
    const std::string id = row.at("id").get<std::string>();
    rows[id] = std::move(row);
  }
  return rows;
}

void check_coverage(const std::map<std::string, json>& predictions, const Dataset& dataset) {
  std::string missing;
  std::map<std::string, bool> known;
  for (const std::string& id : dataset.ids()) {
    known[id] = true;
    if (!predictions.count(id)) missing += (missing.empty() ? "" : ", ") + id;
  }
  std::string unknown;
  for (const auto& [id, row] : predictions)
    if (!known.count(id)) unknown += (unknown.empty() ? "" : ", ") + id;

  if (!missing.empty() && !unknown.empty())
    throw UnknownIdError("predictions missing ids: [" + missing + "]; unknown ids: [" + unknown +
                         "]");
  if (!missing.empty()) throw UnknownIdError("predictions missing ids: [" + missing + "]");
  if (!unknown.empty()) throw UnknownIdError("predictions contain unknown ids: [" + unknown + "]");
}

}  // namespace

MetricReport evaluate(const std::filesystem::path& predictions_path, const Dataset& dataset,
                      const EvalOptions& options) {
  const std::map<std::string, json> predictions = load_predictions(predictions_path);
  check_coverage(predictions, dataset);

  MetricReport report;
  report.count = static_cast<int>(dataset.size());

  switch (dataset.kind) {
    case DatasetKind::mcq: {
      std::vector<McqScoredItem> scored;
      for (const McqItem& item : dataset.mcq) {
        McqScoredItem s;
        s.id = item.id;
        s.category = item.category;
        s.answer_index = item.answer_index;
        const json& row = predictions.at(item.id);
        if (row.contains("option_index") && row.at("option_index").is_number_integer())
          s.predicted = row.at("option_index").get<int>();
        scored.push_back(std::move(s));
        if (std::find(report.category_order.begin(), report.category_order.end(),
                      item.category) == report.category_order.end())
          report.category_order.push_back(item.category);
      }
      report.accuracy = mcq_accuracy(scored);
      break;
    }
    case DatasetKind::caption: {
      std::vector<std::string> candidates;
      std::vector<std::vector<std::string>> references;
      for (const CaptionItem& item : dataset.caption) {
        candidates.push_back(predictions.at(item.id).value("text", ""));
        references.push_back(item.references);
      }
      BleuOptions bleu_options;
      bleu_options.smooth_add1 = options.bleu_smoothing;
      if (options.per_item_bleu) {
        double sum = 0.0;
        for (size_t i = 0; i < candidates.size(); ++i)
          sum += bleu4(candidates[i], references[i], bleu_options);
        report.bleu4 = candidates.empty() ? 0.0 : sum / candidates.size();
      } else {
        report.bleu4 = bleu4_corpus(candidates, references, bleu_options);
      }
      report.cider = cider_corpus(candidates, references);
      double meteor_sum = 0.0;
      for (size_t i = 0; i < candidates.size(); ++i)
        meteor_sum += meteor_lite(candidates[i], references[i]);
      report.meteor = candidates.empty() ? 0.0 : meteor_sum / candidates.size();
      break;
    }
    case DatasetKind::trajectory: {
      std::array<std::vector<double>, 3> pred_axis, truth_axis;
      for (const TrajectoryItem& item : dataset.trajectory) {
        const json& row = predictions.at(item.id);
        if (!row.contains("xyz") || !row.at("xyz").is_array())
          throw UnknownIdError("prediction for '" + item.id + "' has no xyz array");
        const json& xyz = row.at("xyz");
        if (static_cast<int>(xyz.size()) != item.horizon())
          throw LengthMismatchError("prediction for '" + item.id + "' has " +
                                    std::to_string(xyz.size()) + " positions, expected " +
                                    std::to_string(item.horizon()));
        for (int t = 0; t < item.horizon(); ++t) {
          const json& p = xyz.at(t);
          const auto& truth = item.xyz[static_cast<size_t>(item.n_initial + t)];
          for (int axis = 0; axis < 3; ++axis) {
            pred_axis[axis].push_back(p.at(axis).get<double>());
            truth_axis[axis].push_back(truth[static_cast<size_t>(axis)]);
          }
        }
      }
      std::array<double, 4> r{};
      for (int axis = 0; axis < 3; ++axis)
        r[axis] = rmse(pred_axis[axis], truth_axis[axis]);
      r[3] = r[0] + r[1] + r[2];
      report.rmse_xyz_sum = r;

      std::vector<double> pred_all, truth_all;
      for (int axis = 0; axis < 3; ++axis) {
        pred_all.insert(pred_all.end(), pred_axis[axis].begin(), pred_axis[axis].end());
        truth_all.insert(truth_all.end(), truth_axis[axis].begin(), truth_axis[axis].end());
      }
      for (const double sigma : options.sigma_grid)
        report.a_sigma[sigma] = tolerant_accuracy(pred_all, truth_all, sigma);
      break;
    }
  }
  return report;
}

}  // namespace vlp::eval
