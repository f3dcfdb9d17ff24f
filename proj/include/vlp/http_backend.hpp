#pragma once

#include <atomic>
#include <string>

#include "vlp/backend.hpp"

namespace vlp {

struct HttpBackendConfig {
  std::string base_url;          // e.g. http://127.0.0.1:8801
  std::string model;
  std::string auth_env;          // env var holding the bearer token, optional
  std::string id;                // backend_id; derived from model when empty
  int timeout_ms = 30000;
  int max_attempts = 3;          // transport retries, exponential backoff
  int backoff_ms = 100;
  int top_logprobs = 5;          // requested when want_token_scores
  nlohmann::json extra_params = nlohmann::json::object();  // temperature etc.
};

// Chat-completion-style client covering all four request kinds:
//   text_gen / frame_score -> POST /v1/chat/completions
//   video_gen              -> POST /v1/videos/generations
//   action_pred            -> POST /v1/actions/predictions
// Retries transport failures and retryable statuses (408/429/5xx) with
// bounded exponential backoff; malformed bodies raise ProtocolError and
// are never retried.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  BackendResponse call(const BackendRequest& request) override;
  std::string id() const override { return id_; }
  std::uint64_t calls() const override { return calls_.load(); }
  std::uint64_t transport_ops() const override { return transport_ops_.load(); }

  // Request body builders, exposed for wire-contract tests.
  nlohmann::json build_chat_body(const BackendRequest& request) const;
  nlohmann::json build_video_body(const BackendRequest& request) const;
  nlohmann::json build_action_body(const BackendRequest& request) const;

  static BackendResponse parse_chat_response(const nlohmann::json& body, RequestKind kind);

 private:
  std::string endpoint_for(RequestKind kind) const;
  nlohmann::json post_json(const std::string& path, const nlohmann::json& body,
                           const std::string& digest, const std::string& kind);

  HttpBackendConfig config_;
  std::string id_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> transport_ops_{0};
};

}  // namespace vlp
