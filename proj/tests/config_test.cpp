#include <doctest.h>

#include "test_util.hpp"
#include "vlp/config.hpp"

using namespace vlp;
using vlp_test::TempDir;
using vlp_test::write_file;

TEST_CASE("preset table matches the ablation matrix") {
  CHECK(presets().size() == 8);

  const Preset* vanilla = find_preset("vanilla");
  REQUIRE(vanilla);
  CHECK_FALSE(vanilla->vp);
  CHECK_FALSE(vanilla->lp);
  CHECK_FALSE(vanilla->voting);

  const Preset* full = find_preset("vlp-full");
  REQUIRE(full);
  CHECK(full->vp);
  CHECK(full->lp);
  CHECK(full->voting);
  CHECK(full->cs);
  CHECK(full->fs);

  const Preset* no_cs = find_preset("vp-no-cs");
  REQUIRE(no_cs);
  CHECK(no_cs->vp);
  CHECK_FALSE(no_cs->cs);
  CHECK(no_cs->fs);

  const Preset* no_voting = find_preset("lp-no-voting");
  REQUIRE(no_voting);
  CHECK(no_voting->lp);
  CHECK_FALSE(no_voting->voting);

  CHECK(find_preset("nope") == nullptr);

  PipelineConfig config;
  apply_preset(config, "vp-no-fs");
  CHECK(config.enable_vp);
  CHECK(config.enable_cs);
  CHECK_FALSE(config.enable_fs);
  CHECK_FALSE(config.enable_lp);
  CHECK_THROWS_AS(apply_preset(config, "bogus"), ConfigError);
}

TEST_CASE("config round-trip is stable") {
  PipelineConfig config;
  config.enable_vp = true;
  config.enable_lp = false;
  config.k = 6;
  config.n_generated = 3;
  config.seed_label = "trip";
  BackendConfig mock;
  mock.type = "mock";
  mock.script = "/tmp/rules.json";
  mock.id = "m1";
  config.backends["lmm"] = mock;
  BackendConfig http;
  http.type = "http";
  http.base_url = "http://localhost:9";
  http.model = "m";
  http.params = {{"temperature", 0.0}};
  config.backends["llm"] = http;

  const nlohmann::json once = config.to_json();
  const PipelineConfig reparsed = PipelineConfig::from_json(once);
  CHECK(reparsed.to_json() == once);
  CHECK(reparsed.to_json().dump(2) == once.dump(2));
}

TEST_CASE("config validation rejects bad values") {
  PipelineConfig config;
  config.k = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = PipelineConfig{};
  config.enable_vp = true;
  config.n_generated = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.enable_vp = false;
  CHECK_NOTHROW(config.validate());

  config = PipelineConfig{};
  config.selection_policy = "random";
  CHECK_THROWS_AS(config.validate(), ConfigError);

  CHECK_THROWS_AS(BackendConfig::from_json({{"type", "mock"}}), ConfigError);
  CHECK_THROWS_AS(BackendConfig::from_json({{"type", "http"}}), ConfigError);
  CHECK_THROWS_AS(BackendConfig::from_json({{"type", "carrier-pigeon"}}), ConfigError);
}

TEST_CASE("config load resolves mock scripts relative to the config file") {
  TempDir tmp("cfg");
  std::filesystem::create_directories(tmp.path() / "conf");
  write_file(tmp.path() / "rules.json", "[]");
  write_file(tmp.path() / "conf" / "c.json", R"({
    "backends": {"lmm": {"type": "mock", "script": "../rules.json"}}
  })");
  const PipelineConfig config = PipelineConfig::load(tmp.path() / "conf" / "c.json");
  CHECK(std::filesystem::path(config.backends.at("lmm").script).is_absolute());
  CHECK(std::filesystem::exists(config.backends.at("lmm").script));

  CHECK_THROWS_AS(PipelineConfig::load(tmp.path() / "missing.json"), IoError);
  write_file(tmp.path() / "broken.json", "{nope");
  CHECK_THROWS_AS(PipelineConfig::load(tmp.path() / "broken.json"), ConfigError);
}
