#include "vlp/mock_backend.hpp"

#include <fstream>

namespace vlp {

namespace {

std::string expand_pattern(const std::string& pattern, int i) {
  std::string out = pattern;
  const std::string token = "{i}";
  size_t pos;
  while ((pos = out.find(token)) != std::string::npos)
    out.replace(pos, token.size(), std::to_string(i));
  return out;
}

}  // namespace

std::vector<MockRule> MockBackend::parse_rules(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ConfigError("mock script must be a JSON array of rules");
  std::vector<MockRule> rules;
  int n = 0;
  for (const auto& entry : doc) {
    ++n;
    const std::string where = "mock rule " + std::to_string(n);
    if (!entry.contains("match") || !entry.contains("respond"))
      throw ConfigError(where + ": needs match and respond");
    const auto& match = entry.at("match");
    const auto& respond = entry.at("respond");

    MockRule rule;
    if (match.contains("kind"))
      rule.kind = request_kind_from_string(match.at("kind").get<std::string>());
    rule.pattern = match.value("regex", std::string(".*"));
    try {
      rule.regex = std::regex(rule.pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError(where + ": bad regex '" + rule.pattern + "': " + e.what());
    }

    if (respond.contains("text")) rule.response.text = respond.at("text").get<std::string>();
    if (respond.contains("frames"))
      rule.response.frames = respond.at("frames").get<std::vector<std::string>>();
    if (respond.contains("frame_pattern"))
      rule.frame_pattern = respond.at("frame_pattern").get<std::string>();
    if (respond.contains("token_scores"))
      rule.response.token_scores = respond.at("token_scores").get<std::map<std::string, double>>();
    if (respond.contains("actions")) {
      std::vector<std::array<double, 3>> acts;
      for (const auto& a : respond.at("actions"))
        acts.push_back({a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()});
      rule.response.actions = std::move(acts);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& script,
                                                    std::string id) {
  std::ifstream in(script);
  if (!in) throw IoError("cannot open mock script: " + script.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mock script " + script.string() + ": " + e.what());
  }
  if (id.empty()) id = "mock:" + script.stem().string();
  return std::make_unique<MockBackend>(std::move(id), parse_rules(doc));
}

BackendResponse MockBackend::call(const BackendRequest& request) {
  const std::string text = request.concatenated_text();
  for (const MockRule& rule : rules_) {
    if (rule.kind && *rule.kind != request.kind) continue;
    if (!std::regex_search(text, rule.regex)) continue;

    calls_.fetch_add(1);
    {
      std::lock_guard<std::mutex> lock(mu_);
      history_.push_back(request);
    }

    BackendResponse response = rule.response;
    if (rule.frame_pattern) {
      const int n = request.params.value("n_frames", 1);
      std::vector<std::string> frames;
      frames.reserve(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) frames.push_back(expand_pattern(*rule.frame_pattern, i));
      response.frames = std::move(frames);
    }
    response.latency_ms = 0;
    response.from_cache = false;
    return response;
  }
  throw ScriptMissError("no mock rule matches request", cache_key(request), to_string(request.kind));
}

std::vector<BackendRequest> MockBackend::history() const {
  std::lock_guard<std::mutex> lock(mu_);
  return history_;
}

}  // namespace vlp
