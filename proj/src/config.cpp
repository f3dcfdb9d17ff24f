#include "vlp/config.hpp"

#include <fstream>

namespace vlp {

nlohmann::json BackendConfig::to_json() const {
  nlohmann::json j;
  j["type"] = type;
  j["id"] = id;
  j["script"] = script;
  j["base_url"] = base_url;
  j["model"] = model;
  j["auth_env"] = auth_env;
  j["timeout_ms"] = timeout_ms;
  j["max_attempts"] = max_attempts;
  j["backoff_ms"] = backoff_ms;
  j["top_logprobs"] = top_logprobs;
  j["params"] = params;
  return j;
}

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
  BackendConfig c;
  c.type = j.value("type", "mock");
  if (c.type != "mock" && c.type != "http")
    throw ConfigError("backend type must be 'mock' or 'http', got '" + c.type + "'");
  c.id = j.value("id", "");
  c.script = j.value("script", "");
  c.base_url = j.value("base_url", "");
  c.model = j.value("model", "");
  c.auth_env = j.value("auth_env", "");
  c.timeout_ms = j.value("timeout_ms", 30000);
  c.max_attempts = j.value("max_attempts", 3);
  c.backoff_ms = j.value("backoff_ms", 100);
  c.top_logprobs = j.value("top_logprobs", 5);
  c.params = j.value("params", nlohmann::json::object());
  if (c.type == "mock" && c.script.empty())
    throw ConfigError("mock backend requires a script path");
  if (c.type == "http" && c.base_url.empty())
    throw ConfigError("http backend requires a base_url");
  return c;
}

void PipelineConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k_g < 1) throw ConfigError("k_g must be >= 1");
  if (lp_steps < 1) throw ConfigError("lp_steps must be >= 1");
  if (l2v_frames < 1) throw ConfigError("l2v_frames must be >= 1");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (enable_vp && n_generated < 1)
    throw ConfigError("n_generated must be >= 1 when vision planning is enabled");
  if (selection_policy != "augment" && selection_policy != "union_topk")
    throw ConfigError("selection_policy must be 'augment' or 'union_topk'");
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["flags"] = flags_snapshot();
  j["k"] = k;
  j["k_g"] = k_g;
  j["n_generated"] = n_generated;
  j["lp_steps"] = lp_steps;
  j["l2v_frames"] = l2v_frames;
  j["concurrency"] = concurrency;
  j["selection_policy"] = selection_policy;
  nlohmann::json b = nlohmann::json::object();
  for (const auto& [role, cfg] : backends) b[role] = cfg.to_json();
  j["backends"] = std::move(b);
  j["prompt_dir"] = prompt_dir;
  j["cache_dir"] = cache_dir;
  j["seed_label"] = seed_label;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig c;
  const nlohmann::json flags = j.value("flags", nlohmann::json::object());
  c.enable_vp = flags.value("vp", true);
  c.enable_lp = flags.value("lp", true);
  c.enable_voting = flags.value("voting", true);
  c.enable_cs = flags.value("cs", true);
  c.enable_fs = flags.value("fs", true);
  c.strict_voting = flags.value("strict_voting", false);
  c.vps_on_synthesized = flags.value("vps_on_synthesized", true);

  c.k = j.value("k", 4);
  c.k_g = j.value("k_g", 1);
  c.n_generated = j.value("n_generated", 1);
  c.lp_steps = j.value("lp_steps", 3);
  c.l2v_frames = j.value("l2v_frames", 4);
  c.concurrency = j.value("concurrency", 4);
  c.selection_policy = j.value("selection_policy", "augment");

  const nlohmann::json bindings = j.value("backends", nlohmann::json::object());
  for (const auto& [role, cfg] : bindings.items())
    c.backends[role] = BackendConfig::from_json(cfg);

  c.prompt_dir = j.value("prompt_dir", "");
  c.cache_dir = j.value("cache_dir", "");
  c.seed_label = j.value("seed_label", "");
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  PipelineConfig config = from_json(j);
  // Relative mock script and template paths resolve against the config
  // file's directory, so configs work from any working directory.
  const std::filesystem::path base = path.parent_path();
  for (auto& [role, backend] : config.backends)
    if (!backend.script.empty() && std::filesystem::path(backend.script).is_relative())
      backend.script = (base / backend.script).string();
  if (!config.prompt_dir.empty() && std::filesystem::path(config.prompt_dir).is_relative())
    config.prompt_dir = (base / config.prompt_dir).string();
  return config;
}

nlohmann::json PipelineConfig::flags_snapshot() const {
  nlohmann::json flags;
  flags["vp"] = enable_vp;
  flags["lp"] = enable_lp;
  flags["voting"] = enable_voting;
  flags["cs"] = enable_cs;
  flags["fs"] = enable_fs;
  flags["strict_voting"] = strict_voting;
  flags["vps_on_synthesized"] = vps_on_synthesized;
  return flags;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      //            name            vp     lp     vote   cs     fs
      {"vanilla", false, false, false, false, false},
      {"vp", true, false, true, true, true},
      {"lp", false, true, true, false, false},
      {"vlp-full", true, true, true, true, true},
      {"vp-no-cs", true, false, true, false, true},
      {"vp-no-fs", true, false, true, true, false},
      {"vp-no-voting", true, false, false, true, true},
      {"lp-no-voting", false, true, false, false, false},
  };
  return table;
}

const Preset* find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

void apply_preset(PipelineConfig& config, const std::string& name) {
  const Preset* preset = find_preset(name);
  if (!preset) throw ConfigError("unknown preset: " + name);
  config.enable_vp = preset->vp;
  config.enable_lp = preset->lp;
  config.enable_voting = preset->voting;
  config.enable_cs = preset->cs;
  config.enable_fs = preset->fs;
}

}  // namespace vlp
