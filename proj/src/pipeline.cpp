#include "vlp/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <thread>

#include "vlp/http_backend.hpp"
#include "vlp/language_planning.hpp"
#include "vlp/mock_backend.hpp"

namespace vlp {

namespace fs = std::filesystem;

namespace {

std::string sanitize_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return out;
}

void write_atomic(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

nlohmann::json transcript_with_prediction(const DecisionTranscript& transcript,
                                          nlohmann::json prediction) {
  nlohmann::json j = transcript.to_json();
  j["prediction"] = std::move(prediction);
  return j;
}

}  // namespace

FrameSet frames_from_refs(const std::vector<std::string>& refs) {
  std::vector<Frame> frames;
  frames.reserve(refs.size());
  int index = 0;
  for (const std::string& ref : refs)
    frames.push_back(Frame{ref, index++, Provenance::original, std::nullopt});
  return FrameSet::of(std::move(frames));
}

nlohmann::json RunStats::to_json() const {
  nlohmann::json j;
  j["items_total"] = items_total;
  j["items_ok"] = items_ok;
  j["items_failed"] = items_failed;
  j["items_resumed"] = items_resumed;
  j["transport_ops"] = transport_ops;
  j["cache_hits"] = cache_hits;
  j["cache_misses"] = cache_misses;
  j["backend_calls"] = backend_calls;
  return j;
}

PipelineRunner::PipelineRunner(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();

  prompts_ = PromptTemplates::defaults();
  if (!config_.prompt_dir.empty()) prompts_.load_overrides(config_.prompt_dir);

  if (!config_.cache_dir.empty()) cache_ = std::make_shared<DiskCache>(config_.cache_dir);

  for (const auto& [role_name, backend_config] : config_.backends) {
    std::shared_ptr<Backend> backend;
    if (backend_config.type == "mock") {
      backend = MockBackend::from_file(backend_config.script, backend_config.id);
    } else {
      HttpBackendConfig http;
      http.base_url = backend_config.base_url;
      http.model = backend_config.model;
      http.auth_env = backend_config.auth_env;
      http.id = backend_config.id;
      http.timeout_ms = backend_config.timeout_ms;
      http.max_attempts = backend_config.max_attempts;
      http.backoff_ms = backend_config.backoff_ms;
      http.top_logprobs = backend_config.top_logprobs;
      http.extra_params = backend_config.params;
      backend = std::make_shared<HttpBackend>(std::move(http));
    }
    if (cache_) {
      auto caching = std::make_shared<CachingBackend>(backend, cache_);
      cached_[role_name] = caching;
      backends_[role_name] = caching;
    } else {
      backends_[role_name] = backend;
    }
  }

  // Fail before any backend call when an enabled stage has no binding.
  require_role("lmm");
  if (config_.enable_lp || (config_.enable_vp && config_.enable_cs)) require_role("llm");
  if (config_.enable_vp && config_.enable_fs) require_role("scorer");
  if (config_.enable_vp && !role("generator") && !role("i2v") && !role("vpred"))
    throw ConfigError("vision planning enabled but no generator backend bound");
}

Backend* PipelineRunner::role(const std::string& name) const {
  const auto it = backends_.find(name);
  return it == backends_.end() ? nullptr : it->second.get();
}

Backend* PipelineRunner::require_role(const std::string& name) const {
  Backend* b = role(name);
  if (!b) throw ConfigError("no backend bound for role '" + name + "'");
  return b;
}

VideoGenerators PipelineRunner::generators() const {
  VideoGenerators g;
  g.image_to_video = role("i2v") ? role("i2v") : role("generator");
  g.video_prediction = role("vpred") ? role("vpred") : role("generator");
  return g;
}

DecisionTranscript PipelineRunner::run_normalized(const std::string& id, const Query& query,
                                                  const FrameSet& frames) {
  DecisionTranscript transcript;
  transcript.item_id = id;
  transcript.config_snapshot = config_.flags_snapshot();
  Trace& trace = transcript.trace;

  NormalizeOptions norm;
  norm.l2v_frames = config_.l2v_frames;
  const NormalizedInput input =
      normalize(query, frames, role("l2v"), role("v2l"), prompts_, norm, &trace);

  std::optional<VisionPlan> vplan;
  if (config_.enable_vp) {
    const bool skip_vps = input.synthesized_side == SynthesizedSide::vision_synthesized &&
                          !config_.vps_on_synthesized;
    if (skip_vps) {
      VisionPlan plan;
      plan.cs_decision = CsDecision::disabled;
      plan.policy = selection_policy_from_string(config_.selection_policy);
      plan.k = config_.k;
      plan.k_g = config_.k_g;
      plan.frames = input.vision.frames;
      plan.scores.assign(plan.frames.size(), 1.0);
      vplan = std::move(plan);
    } else {
      VisionPlanConfig vp_config;
      vp_config.enable_cs = config_.enable_cs;
      vp_config.enable_fs = config_.enable_fs;
      vp_config.policy = selection_policy_from_string(config_.selection_policy);
      vp_config.k = config_.k;
      vp_config.k_g = config_.k_g;
      vp_config.n_generated = config_.n_generated;
      VisionPlanBackends vp_backends;
      vp_backends.cs_llm = role("llm");
      vp_backends.generators = generators();
      vp_backends.scorer = role("scorer");
      try {
        vplan = build_vision_plan(input.vision, input.language, vp_config, vp_backends, prompts_,
                                  &trace);
      } catch (const Error& e) {
        trace.add("vp_error", "", e.what());
      }
    }
  }

  std::optional<LanguagePlan> lplan;
  if (config_.enable_lp) {
    try {
      lplan = decompose(input.language, *require_role("llm"), prompts_, config_.lp_steps, &trace);
    } catch (const Error& e) {
      trace.add("lp_error", "", e.what());
    }
  }

  DecisionConfig decision;
  decision.enable_vp = config_.enable_vp;
  decision.enable_lp = config_.enable_lp;
  decision.enable_voting = config_.enable_voting;
  decision.strict_voting = config_.strict_voting;
  decision.frame_budget = config_.k;

  const DecisionOutcome outcome =
      decide(input, vplan, lplan, decision, *require_role("lmm"), prompts_, &trace);
  transcript.answers = outcome.answers;
  return transcript;
}

DecisionTranscript PipelineRunner::run_mcq_item(const eval::McqItem& item) {
  Query query;
  query.text = item.question;
  query.options = item.options;
  query.category = item.category;
  query.ground_truth = item.answer_index;
  query.validate();
  return run_normalized(item.id, query, frames_from_refs(item.frames));
}

DecisionTranscript PipelineRunner::run_caption_item(const eval::CaptionItem& item) {
  Query query;
  query.ground_truth = item.references;
  return run_normalized(item.id, query, frames_from_refs(item.frames));
}

DecisionTranscript PipelineRunner::run_trajectory_item(const eval::TrajectoryItem& item) {
  DecisionTranscript transcript;
  transcript.item_id = item.id;
  transcript.config_snapshot = config_.flags_snapshot();
  Trace& trace = transcript.trace;

  const int n = static_cast<int>(item.frames.size());
  std::vector<std::string> initial(item.frames.begin(), item.frames.begin() + item.n_initial);

  std::vector<std::string> action_input = initial;
  if (config_.enable_vp) {
    const FrameSet generated =
        generate_future_frames(frames_from_refs(initial), config_.n_generated, generators(), &trace);
    for (const Frame& f : generated.frames) action_input.push_back(f.image_ref);
  }
  for (int i = n - item.n_goal; i < n; ++i) action_input.push_back(item.frames[i]);

  BackendRequest request;
  request.kind = RequestKind::action_pred;
  Message m{Role::user, {}};
  for (const std::string& ref : action_input) m.parts.push_back(image_part(ref));
  request.messages = {std::move(m)};
  request.params["horizon"] = item.horizon();

  const BackendResponse response = dispatch(*require_role("action"), request);
  trace.add("action_pred", cache_key(request), response.payload_summary());
  if (static_cast<int>(response.actions->size()) != item.horizon())
    throw CountMismatchError("action backend returned " +
                             std::to_string(response.actions->size()) + " positions, expected " +
                             std::to_string(item.horizon()));

  // Stash the predicted trajectory as the final "answer" payload.
  Answer final;
  final.stage = Stage::final_answer;
  final.text = response.payload_summary();
  transcript.answers["final"] = final;
  return transcript;
}

RunResult PipelineRunner::run(const fs::path& dataset_path, eval::DatasetKind kind,
                              const fs::path& out_dir) {
  // Kind-level role requirements fail before any backend call.
  if (kind == eval::DatasetKind::caption) require_role("v2l");
  if (kind == eval::DatasetKind::trajectory) require_role("action");

  const eval::Dataset dataset = eval::load_dataset(dataset_path, kind);
  const fs::path transcript_dir = out_dir / "transcripts";
  fs::create_directories(transcript_dir);

  struct ItemOutcome {
    std::string id;
    nlohmann::json prediction;
    bool failed = false;
    bool resumed = false;
    std::string error;
  };

  const size_t total = dataset.size();
  std::vector<ItemOutcome> outcomes(total);
  std::atomic<size_t> cursor{0};

  auto process_one = [&](size_t index) {
    ItemOutcome& out = outcomes[index];
    std::string id;
    try {
      nlohmann::json prediction;
      DecisionTranscript transcript;
      switch (kind) {
        case eval::DatasetKind::mcq: {
          const eval::McqItem& item = dataset.mcq[index];
          id = item.id;
          break;
        }
        case eval::DatasetKind::caption: {
          id = dataset.caption[index].id;
          break;
        }
        case eval::DatasetKind::trajectory: {
          id = dataset.trajectory[index].id;
          break;
        }
      }
      out.id = id;

      const fs::path transcript_path = transcript_dir / (sanitize_filename(id) + ".json");
      if (fs::exists(transcript_path)) {
        std::ifstream in(transcript_path);
        nlohmann::json existing;
        in >> existing;
        out.prediction = existing.at("prediction");
        out.resumed = true;
        return;
      }

      switch (kind) {
        case eval::DatasetKind::mcq: {
          const eval::McqItem& item = dataset.mcq[index];
          transcript = run_mcq_item(item);
          const Answer& final = transcript.answers.at("final");
          prediction["id"] = id;
          prediction["option_index"] =
              final.option_index ? nlohmann::json(*final.option_index) : nlohmann::json();
          prediction["text"] = final.text;
          break;
        }
        case eval::DatasetKind::caption: {
          transcript = run_caption_item(dataset.caption[index]);
          prediction["id"] = id;
          prediction["text"] = transcript.answers.at("final").text;
          break;
        }
        case eval::DatasetKind::trajectory: {
          const eval::TrajectoryItem& item = dataset.trajectory[index];
          transcript = run_trajectory_item(item);
          // Final round holds the action_pred payload; re-parse for the row.
          prediction["id"] = id;
          nlohmann::json xyz = nlohmann::json::array();
          for (const Round& r : transcript.trace.rounds)
            if (r.stage == "action_pred") xyz = nlohmann::json::parse(r.response_text);
          prediction["xyz"] = std::move(xyz);
          break;
        }
      }

      write_atomic(transcript_path,
                   transcript_with_prediction(transcript, prediction).dump(2) + "\n");
      out.prediction = std::move(prediction);
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
      nlohmann::json row;
      row["id"] = out.id.empty() ? ("item_" + std::to_string(index)) : out.id;
      row["error"] = out.error;
      out.prediction = std::move(row);
    }
  };

  const int workers =
      std::max(1, std::min<int>(config_.concurrency, static_cast<int>(total)));
  if (workers <= 1) {
    for (size_t i = 0; i < total; ++i) process_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < total; i = cursor.fetch_add(1)) process_one(i);
      });
    for (std::thread& t : pool) t.join();
  }

  RunResult result;
  result.predictions_path = out_dir / "predictions.jsonl";
  {
    std::string content;
    for (const ItemOutcome& out : outcomes) content += out.prediction.dump() + "\n";
    write_atomic(result.predictions_path, content);
  }

  result.stats = collect_stats();
  result.stats.items_total = total;
  for (const ItemOutcome& out : outcomes) {
    if (out.failed)
      ++result.stats.items_failed;
    else
      ++result.stats.items_ok;
    if (out.resumed) ++result.stats.items_resumed;
  }
  write_atomic(out_dir / "run_stats.json", result.stats.to_json().dump(2) + "\n");
  write_atomic(out_dir / "run_config.json", config_.to_json().dump(2) + "\n");

  result.exit_code = result.stats.items_failed > 0 ? 1 : 0;
  return result;
}

RunStats PipelineRunner::collect_stats() const {
  RunStats stats;
  for (const auto& [role_name, backend] : backends_) {
    stats.backend_calls[role_name] = backend->calls();
    stats.transport_ops += backend->transport_ops();
  }
  for (const auto& [role_name, caching] : cached_) {
    stats.cache_hits += caching->hits();
    stats.cache_misses += caching->misses();
  }
  return stats;
}

}  // namespace vlp
