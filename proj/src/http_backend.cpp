#include "vlp/http_backend.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace vlp {

namespace {

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

std::string short_hash(const std::string& s) {
  BackendRequest probe;
  probe.backend_id = s;
  return cache_key(probe).substr(0, 8);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("http backend requires base_url");
  if (!config_.id.empty()) {
    id_ = config_.id;
  } else {
    // Fold endpoint + sampling params into the id so cache keys change
    // whenever the effective model configuration changes.
    id_ = config_.model + "#" +
          short_hash(config_.base_url + "|" + config_.model + "|" + config_.extra_params.dump());
  }
}

std::string HttpBackend::endpoint_for(RequestKind kind) const {
  switch (kind) {
    case RequestKind::text_gen:
    case RequestKind::frame_score: return "/v1/chat/completions";
    case RequestKind::video_gen: return "/v1/videos/generations";
    case RequestKind::action_pred: return "/v1/actions/predictions";
  }
  return "/v1/chat/completions";
}

nlohmann::json HttpBackend::build_chat_body(const BackendRequest& request) const {
  nlohmann::json body;
  body["model"] = config_.model;
  nlohmann::json messages = nlohmann::json::array();
  for (const Message& m : request.messages) {
    nlohmann::json content = nlohmann::json::array();
    for (const MessagePart& p : m.parts) {
      if (p.text)
        content.push_back({{"type", "text"}, {"text", *p.text}});
      else
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", *p.image_ref}}}});
    }
    messages.push_back({{"role", to_string(m.role)}, {"content", std::move(content)}});
  }
  body["messages"] = std::move(messages);
  if (request.params.value("want_token_scores", false)) {
    body["logprobs"] = true;
    body["top_logprobs"] = config_.top_logprobs;
  }
  for (const auto& [k, v] : config_.extra_params.items()) body[k] = v;
  return body;
}

nlohmann::json HttpBackend::build_video_body(const BackendRequest& request) const {
  nlohmann::json body;
  body["model"] = config_.model;
  std::vector<std::string> frames;
  std::string prompt;
  for (const Message& m : request.messages)
    for (const MessagePart& p : m.parts) {
      if (p.image_ref) frames.push_back(*p.image_ref);
      if (p.text) {
        if (!prompt.empty()) prompt += "\n";
        prompt += *p.text;
      }
    }
  body["frames"] = frames;
  if (!prompt.empty()) body["prompt"] = prompt;
  body["n_frames"] = request.params.value("n_frames", 1);
  return body;
}

nlohmann::json HttpBackend::build_action_body(const BackendRequest& request) const {
  nlohmann::json body;
  body["model"] = config_.model;
  std::vector<std::string> frames;
  for (const Message& m : request.messages)
    for (const MessagePart& p : m.parts)
      if (p.image_ref) frames.push_back(*p.image_ref);
  body["frames"] = frames;
  body["horizon"] = request.params.value("horizon", 1);
  return body;
}

BackendResponse HttpBackend::parse_chat_response(const nlohmann::json& body, RequestKind kind) {
  if (!body.contains("choices") || !body.at("choices").is_array() || body.at("choices").empty())
    throw ProtocolError("chat response has no choices");
  const auto& choice = body.at("choices").at(0);

  if (kind == RequestKind::frame_score && choice.contains("logprobs") &&
      !choice.at("logprobs").is_null()) {
    const auto& lp = choice.at("logprobs");
    if (lp.contains("content") && lp.at("content").is_array() && !lp.at("content").empty()) {
      const auto& first = lp.at("content").at(0);
      std::map<std::string, double> scores;
      auto add = [&scores](const nlohmann::json& tok) {
        const std::string token = tok.at("token").get<std::string>();
        const double p = std::exp(tok.at("logprob").get<double>());
        scores[token] = std::clamp(p, 0.0, 1.0);
      };
      add(first);
      if (first.contains("top_logprobs"))
        for (const auto& tok : first.at("top_logprobs")) add(tok);
      BackendResponse r;
      r.token_scores = std::move(scores);
      return r;
    }
  }

  const auto& message = choice.at("message");
  const auto& content = message.at("content");
  BackendResponse r;
  if (content.is_string()) {
    r.text = content.get<std::string>();
  } else if (content.is_array()) {
    std::string text;
    for (const auto& part : content)
      if (part.value("type", "") == "text") text += part.value("text", "");
    r.text = std::move(text);
  } else {
    throw ProtocolError("chat response content is neither string nor parts array");
  }
  return r;
}

nlohmann::json HttpBackend::post_json(const std::string& path, const nlohmann::json& body,
                                      const std::string& digest, const std::string& kind) {
  httplib::Headers headers;
  if (!config_.auth_env.empty()) {
    if (const char* token = std::getenv(config_.auth_env.c_str()))
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      const int delay = std::min(config_.backoff_ms * (1 << (attempt - 2)), 2000);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    transport_ops_.fetch_add(1);

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    auto res = client.Post(path, headers, payload, "application/json");

    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("malformed response body: ") + e.what(), digest, kind);
      }
    }
    last_error = "http status " + std::to_string(res->status) + ": " + res->body;
    if (!retryable_status(res->status))
      throw TransportError(last_error, digest, kind);
  }
  throw TransportError(last_error + " (after " + std::to_string(config_.max_attempts) + " attempts)",
                       digest, kind);
}

BackendResponse HttpBackend::call(const BackendRequest& request) {
  calls_.fetch_add(1);
  const std::string digest = cache_key(request);
  const std::string kind = to_string(request.kind);
  const auto started = std::chrono::steady_clock::now();

  nlohmann::json body;
  switch (request.kind) {
    case RequestKind::text_gen:
    case RequestKind::frame_score: body = build_chat_body(request); break;
    case RequestKind::video_gen: body = build_video_body(request); break;
    case RequestKind::action_pred: body = build_action_body(request); break;
  }

  const nlohmann::json reply = post_json(endpoint_for(request.kind), body, digest, kind);

  BackendResponse response;
  try {
    switch (request.kind) {
      case RequestKind::text_gen:
      case RequestKind::frame_score:
        response = parse_chat_response(reply, request.kind);
        break;
      case RequestKind::video_gen:
        response.frames = reply.at("frames").get<std::vector<std::string>>();
        break;
      case RequestKind::action_pred: {
        std::vector<std::array<double, 3>> actions;
        for (const auto& a : reply.at("actions"))
          actions.push_back({a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()});
        response.actions = std::move(actions);
        break;
      }
    }
  } catch (const ProtocolError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed response body: ") + e.what(), digest, kind);
  }

  const auto elapsed = std::chrono::steady_clock::now() - started;
  response.latency_ms =
      static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
  response.from_cache = false;
  return response;
}

}  // namespace vlp
