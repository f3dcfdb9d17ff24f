#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vlp/errors.hpp"

namespace vlp {

enum class RequestKind { text_gen, video_gen, frame_score, action_pred };

const char* to_string(RequestKind k);
RequestKind request_kind_from_string(const std::string& s);

enum class Role { system, user, assistant };

const char* to_string(Role r);

// One content part: exactly one of text / image_ref is set.
struct MessagePart {
  std::optional<std::string> text;
  std::optional<std::string> image_ref;
};

MessagePart text_part(std::string text);
MessagePart image_part(std::string image_ref);

struct Message {
  Role role = Role::user;
  std::vector<MessagePart> parts;
};

// Canonical wire-level record for every model call. Equal requests
// serialize equal, so they hash equal (the cache key).
struct BackendRequest {
  RequestKind kind = RequestKind::text_gen;
  std::vector<Message> messages;
  nlohmann::json params = nlohmann::json::object();
  std::string backend_id;

  void validate() const;

  // All text content joined with '\n', image refs included as their
  // locator strings. This is the surface mock rules match against.
  std::string concatenated_text() const;
};

struct BackendResponse {
  std::optional<std::string> text;
  std::optional<std::vector<std::string>> frames;
  std::optional<std::map<std::string, double>> token_scores;
  std::optional<std::vector<std::array<double, 3>>> actions;
  int latency_ms = 0;
  bool from_cache = false;

  void validate(RequestKind kind) const;

  nlohmann::json to_json() const;
  static BackendResponse from_json(const nlohmann::json& j);

  // Compact single-line rendering of whichever payload is set; used for
  // transcript rounds.
  std::string payload_summary() const;
};

// Deterministic serialization: sorted keys, no whitespace. Any semantic
// difference in messages/params/backend_id changes the output.
std::string canonical_request_json(const BackendRequest& request);

// 64-hex-char SHA-256 digest of the canonical request, stable across
// runs and platforms.
std::string cache_key(const BackendRequest& request);

// Probability of the "Yes" token. Case-insensitive, leading/trailing
// whitespace variants of the key are merged by summing. Falls back to
// prefix-parsing the text payload (yes -> 1.0, no -> 0.0). A token_scores
// map without any yes variant scores 0.0; throws UnscorableError only
// when neither token_scores nor parseable text is available.
double score_yes(const BackendResponse& response);

class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendResponse call(const BackendRequest& request) = 0;
  virtual std::string id() const = 0;

  // Logical calls answered by this backend.
  virtual std::uint64_t calls() const { return 0; }
  // Network attempts (0 for anything that never touches a socket).
  virtual std::uint64_t transport_ops() const { return 0; }
};

// Stamps the backend id and validates before calling.
BackendResponse dispatch(Backend& backend, BackendRequest request);

// score_yes over a fresh frame_score call.
double score_yes(Backend& backend, BackendRequest request);

}  // namespace vlp
