#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "vlp/cache.hpp"
#include "vlp/eval/evaluate.hpp"
#include "vlp/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitItemFailures = 1;
constexpr int kExitConfigError = 2;

struct FlagOverrides {
  std::string preset;
  std::optional<bool> vp, lp, voting, cs, fs;
  std::optional<int> k, k_g, n_generated, lp_steps, concurrency;
  std::optional<std::string> cache_dir, selection_policy;
};

vlp::PipelineConfig resolve_config(const std::string& config_path, const FlagOverrides& over) {
  vlp::PipelineConfig config = vlp::PipelineConfig::load(config_path);
  if (!over.preset.empty()) vlp::apply_preset(config, over.preset);
  if (over.vp) config.enable_vp = *over.vp;
  if (over.lp) config.enable_lp = *over.lp;
  if (over.voting) config.enable_voting = *over.voting;
  if (over.cs) config.enable_cs = *over.cs;
  if (over.fs) config.enable_fs = *over.fs;
  if (over.k) config.k = *over.k;
  if (over.k_g) config.k_g = *over.k_g;
  if (over.n_generated) config.n_generated = *over.n_generated;
  if (over.lp_steps) config.lp_steps = *over.lp_steps;
  if (over.concurrency) config.concurrency = *over.concurrency;
  if (over.selection_policy) config.selection_policy = *over.selection_policy;
  if (over.cache_dir) config.cache_dir = *over.cache_dir;
  if (const char* env_cache = std::getenv("VLP_CACHE_DIR"); env_cache && !over.cache_dir)
    config.cache_dir = env_cache;
  config.validate();
  return config;
}

void add_override_flags(CLI::App* cmd, FlagOverrides& over) {
  cmd->add_option("--preset", over.preset, "Named ablation preset (see `vlp presets`)");
  cmd->add_flag("--vp,!--no-vp", [&over](int64_t count) { over.vp = count > 0; },
                "Force vision planning on/off");
  cmd->add_flag("--lp,!--no-lp", [&over](int64_t count) { over.lp = count > 0; },
                "Force language planning on/off");
  cmd->add_flag("--voting,!--no-voting", [&over](int64_t count) { over.voting = count > 0; },
                "Force voting on/off");
  cmd->add_flag("--cs,!--no-cs", [&over](int64_t count) { over.cs = count > 0; },
                "Force the coarse selector on/off");
  cmd->add_flag("--fs,!--no-fs", [&over](int64_t count) { over.fs = count > 0; },
                "Force the fine selector on/off");
  cmd->add_option_function<int>("--k", [&over](const int& v) { over.k = v; }, "Frame budget K");
  cmd->add_option_function<int>("--k-g", [&over](const int& v) { over.k_g = v; },
                                "Generated-frame budget (augment policy)");
  cmd->add_option_function<int>("--n-generated",
                                [&over](const int& v) { over.n_generated = v; },
                                "Future frames to generate");
  cmd->add_option_function<int>("--lp-steps", [&over](const int& v) { over.lp_steps = v; },
                                "Language plan step count");
  cmd->add_option_function<int>("--concurrency", [&over](const int& v) { over.concurrency = v; },
                                "In-flight items (1 = sequential)");
  cmd->add_option_function<std::string>(
      "--selection-policy", [&over](const std::string& v) { over.selection_policy = v; },
      "union_topk or augment");
  cmd->add_option_function<std::string>(
      "--cache-dir", [&over](const std::string& v) { over.cache_dir = v; },
      "Response cache directory (enables caching)");
}

int cmd_run(const std::string& config_path, const FlagOverrides& over,
            const std::string& dataset_path, const std::string& kind_name,
            const std::string& out_dir) {
  vlp::PipelineConfig config;
  vlp::eval::DatasetKind kind;
  try {
    config = resolve_config(config_path, over);
    kind = vlp::eval::dataset_kind_from_string(kind_name);
  } catch (const vlp::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    vlp::PipelineRunner runner(config);
    const vlp::RunResult result = runner.run(dataset_path, kind, out_dir);
    std::cout << "items: " << result.stats.items_total << " ok: " << result.stats.items_ok
              << " failed: " << result.stats.items_failed
              << " resumed: " << result.stats.items_resumed << "\n"
              << "predictions: " << result.predictions_path.string() << "\n";
    return result.exit_code == 0 ? kExitOk : kExitItemFailures;
  } catch (const vlp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const vlp::SchemaViolationError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const vlp::Error& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitItemFailures;
  }
}

int cmd_eval(const std::string& predictions, const std::string& dataset_path,
             const std::string& kind_name, const std::string& out_base, bool per_item_bleu,
             bool bleu_smoothing) {
  try {
    const vlp::eval::DatasetKind kind = vlp::eval::dataset_kind_from_string(kind_name);
    const vlp::eval::Dataset dataset = vlp::eval::load_dataset(dataset_path, kind);
    vlp::eval::EvalOptions options;
    options.per_item_bleu = per_item_bleu;
    options.bleu_smoothing = bleu_smoothing;
    const vlp::eval::MetricReport report = vlp::eval::evaluate(predictions, dataset, options);

    const std::string markdown = report.to_markdown();
    std::cout << markdown;
    if (!out_base.empty()) {
      std::ofstream json_out(out_base + ".json");
      json_out << report.to_json().dump(2) << "\n";
      std::ofstream md_out(out_base + ".md");
      md_out << markdown;
      std::cout << "report: " << out_base << ".json, " << out_base << ".md\n";
    }
    return kExitOk;
  } catch (const vlp::UnknownIdError& e) {
    std::cerr << "id mismatch: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const vlp::Error& e) {
    std::cerr << "eval error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_report(const std::string& report_path) {
  try {
    std::ifstream in(report_path);
    if (!in) throw vlp::IoError("cannot open report: " + report_path);
    nlohmann::json j;
    in >> j;

    vlp::eval::MetricReport report;
    report.count = j.value("count", 0);
    if (j.contains("accuracy")) {
      vlp::eval::McqAccuracyReport acc;
      for (const auto& [category, bucket] : j.at("accuracy").at("per_category").items()) {
        vlp::eval::CategoryCount c;
        c.correct = bucket.value("correct", 0);
        c.total = bucket.value("total", 0);
        acc.per_category[category] = c;
      }
      if (j.at("accuracy").contains("category_order"))
        report.category_order =
            j.at("accuracy").at("category_order").get<std::vector<std::string>>();
      else
        for (const auto& [category, bucket] : j.at("accuracy").at("per_category").items())
          report.category_order.push_back(category);
      acc.correct = j.at("accuracy").value("correct", 0);
      acc.total = j.at("accuracy").value("total", 0);
      report.accuracy = std::move(acc);
    }
    if (j.contains("bleu4")) report.bleu4 = j.at("bleu4").get<double>();
    if (j.contains("cider")) report.cider = j.at("cider").get<double>();
    if (j.contains("meteor")) report.meteor = j.at("meteor").get<double>();
    if (j.contains("rmse")) {
      report.rmse_xyz_sum = {j.at("rmse").at("x").get<double>(), j.at("rmse").at("y").get<double>(),
                             j.at("rmse").at("z").get<double>(),
                             j.at("rmse").at("sum").get<double>()};
    }
    if (j.contains("a_sigma"))
      for (const auto& [sigma, fraction] : j.at("a_sigma").items())
        report.a_sigma[std::stod(sigma)] = fraction.get<double>();

    std::cout << report.to_markdown();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "report error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_presets() {
  std::cout << "preset        vp  lp  voting  cs  fs\n";
  for (const vlp::Preset& p : vlp::presets()) {
    std::printf("%-13s %-3s %-3s %-7s %-3s %-3s\n", p.name.c_str(), p.vp ? "on" : "-",
                p.lp ? "on" : "-", p.voting ? "on" : "-", p.cs ? "on" : "-", p.fs ? "on" : "-");
  }
  return kExitOk;
}

int cmd_cache(const std::string& dir, bool clear) {
  try {
    vlp::DiskCache cache(dir);
    if (clear) {
      cache.clear();
      std::cout << "cleared " << dir << "\n";
    } else {
      std::cout << "entries: " << cache.entry_count() << "\nbytes: " << cache.total_bytes()
                << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "cache error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vlp - vision-language planning pipeline"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Execute the pipeline over a dataset");
  std::string run_config, run_dataset, run_kind = "mcq", run_out = "out";
  FlagOverrides over;
  run->add_option("--config", run_config, "Pipeline config JSON")->required();
  run->add_option("--dataset", run_dataset, "Dataset JSONL")->required();
  run->add_option("--kind", run_kind, "mcq | caption | trajectory");
  run->add_option("--out", run_out, "Output directory");
  add_override_flags(run, over);

  // eval
  auto* eval = app.add_subcommand("eval", "Score a predictions file against a dataset");
  std::string eval_predictions, eval_dataset, eval_kind = "mcq", eval_out;
  bool per_item_bleu = false, bleu_smoothing = false;
  eval->add_option("--predictions", eval_predictions, "Predictions JSONL")->required();
  eval->add_option("--dataset", eval_dataset, "Dataset JSONL")->required();
  eval->add_option("--kind", eval_kind, "mcq | caption | trajectory");
  eval->add_option("--out", eval_out, "Report base path (writes .json and .md)");
  eval->add_flag("--per-item-bleu", per_item_bleu, "Mean of per-item BLEU instead of corpus");
  eval->add_flag("--bleu-smoothing", bleu_smoothing, "Add-1 smoothing on zero counts");

  // report
  auto* rep = app.add_subcommand("report", "Render a report JSON as markdown");
  std::string report_path;
  rep->add_option("report", report_path, "Report JSON path")->required();

  // presets
  auto* pre = app.add_subcommand("presets", "List the ablation presets");

  // cache
  auto* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
  std::string cache_dir;
  bool cache_clear = false;
  cache->add_option("--dir", cache_dir, "Cache directory")->required();
  cache->add_flag("--clear", cache_clear, "Delete all entries");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_config, over, run_dataset, run_kind, run_out);
  if (eval->parsed())
    return cmd_eval(eval_predictions, eval_dataset, eval_kind, eval_out, per_item_bleu,
                    bleu_smoothing);
  if (rep->parsed()) return cmd_report(report_path);
  if (pre->parsed()) return cmd_presets();
  if (cache->parsed()) return cmd_cache(cache_dir, cache_clear);
  return kExitOk;
}
