#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vlp/errors.hpp"

namespace vlp {

// One backend binding: a deterministic scripted mock or an HTTP endpoint.
struct BackendConfig {
  std::string type = "mock";  // "mock" | "http"
  std::string id;             // backend_id override
  std::string script;         // mock rule file
  std::string base_url;
  std::string model;
  std::string auth_env;       // env var holding the bearer token
  int timeout_ms = 30000;
  int max_attempts = 3;
  int backoff_ms = 100;
  int top_logprobs = 5;
  nlohmann::json params = nlohmann::json::object();

  nlohmann::json to_json() const;
  static BackendConfig from_json(const nlohmann::json& j);
};

// Full run configuration. Backend bindings are keyed by role: lmm, llm,
// scorer, i2v, vpred, generator (serves both i2v and vpred), l2v, v2l,
// action. cs/fs only take effect while vp is enabled.
struct PipelineConfig {
  bool enable_vp = true;
  bool enable_lp = true;
  bool enable_voting = true;
  bool enable_cs = true;
  bool enable_fs = true;
  bool strict_voting = false;
  bool vps_on_synthesized = true;  // run VPS over L2V-synthesized videos too

  int k = 4;
  int k_g = 1;
  int n_generated = 1;
  int lp_steps = 3;
  int l2v_frames = 4;
  int concurrency = 4;
  std::string selection_policy = "augment";

  std::map<std::string, BackendConfig> backends;
  std::string prompt_dir;
  std::string cache_dir;
  std::string seed_label;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);

  // The ablation flags in force, embedded in every transcript.
  nlohmann::json flags_snapshot() const;
};

// Named ablation preset: the flag vector it forces.
struct Preset {
  std::string name;
  bool vp, lp, voting, cs, fs;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);
void apply_preset(PipelineConfig& config, const std::string& name);

}  // namespace vlp
