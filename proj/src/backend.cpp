#include "vlp/backend.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace vlp {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace

const char* to_string(RequestKind k) {
  switch (k) {
    case RequestKind::text_gen: return "text_gen";
    case RequestKind::video_gen: return "video_gen";
    case RequestKind::frame_score: return "frame_score";
    case RequestKind::action_pred: return "action_pred";
  }
  return "text_gen";
}

RequestKind request_kind_from_string(const std::string& s) {
  if (s == "text_gen") return RequestKind::text_gen;
  if (s == "video_gen") return RequestKind::video_gen;
  if (s == "frame_score") return RequestKind::frame_score;
  if (s == "action_pred") return RequestKind::action_pred;
  throw ConfigError("unknown request kind: " + s);
}

const char* to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

MessagePart text_part(std::string text) {
  MessagePart p;
  p.text = std::move(text);
  return p;
}

MessagePart image_part(std::string image_ref) {
  MessagePart p;
  p.image_ref = std::move(image_ref);
  return p;
}

void BackendRequest::validate() const {
  for (const Message& m : messages)
    for (const MessagePart& p : m.parts)
      if (p.text.has_value() == p.image_ref.has_value())
        throw Error("message part must carry exactly one of text/image_ref");

  int images = 0;
  bool any_text = false;
  for (const Message& m : messages)
    for (const MessagePart& p : m.parts) {
      if (p.image_ref) ++images;
      if (p.text && !p.text->empty()) any_text = true;
    }

  switch (kind) {
    case RequestKind::text_gen:
      if (messages.empty()) throw Error("text_gen request requires messages");
      break;
    case RequestKind::frame_score:
      if (messages.empty()) throw Error("frame_score request requires messages");
      if (images < 1) throw Error("frame_score request requires an image_ref");
      break;
    case RequestKind::video_gen:
      // Video prediction conditions on frames; language-to-video conditions
      // on text only. One of the two must be present.
      if (images < 1 && !any_text)
        throw Error("video_gen request requires input frames or a text prompt");
      break;
    case RequestKind::action_pred:
      if (images < 1) throw Error("action_pred request requires image refs");
      break;
  }
}

std::string BackendRequest::concatenated_text() const {
  std::string out;
  for (const Message& m : messages)
    for (const MessagePart& p : m.parts) {
      const std::string& piece = p.text ? *p.text : *p.image_ref;
      if (!out.empty()) out += "\n";
      out += piece;
    }
  return out;
}

void BackendResponse::validate(RequestKind kind) const {
  const int populated = (text ? 1 : 0) + (frames ? 1 : 0) + (token_scores ? 1 : 0) + (actions ? 1 : 0);
  if (populated != 1)
    throw Error("response must populate exactly one payload field, got " + std::to_string(populated));
  switch (kind) {
    case RequestKind::text_gen:
      if (!text) throw Error("text_gen response must carry text");
      break;
    case RequestKind::video_gen:
      if (!frames) throw Error("video_gen response must carry frames");
      break;
    case RequestKind::frame_score:
      if (!token_scores && !text) throw Error("frame_score response must carry token_scores or text");
      break;
    case RequestKind::action_pred:
      if (!actions) throw Error("action_pred response must carry actions");
      break;
  }
  if (token_scores)
    for (const auto& [tok, p] : *token_scores)
      if (p < 0.0 || p > 1.0)
        throw Error("token probability out of [0,1] for '" + tok + "'");
}

nlohmann::json BackendResponse::to_json() const {
  nlohmann::json j;
  if (text) j["text"] = *text;
  if (frames) j["frames"] = *frames;
  if (token_scores) j["token_scores"] = *token_scores;
  if (actions) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : *actions) arr.push_back({a[0], a[1], a[2]});
    j["actions"] = arr;
  }
  j["latency_ms"] = latency_ms;
  j["from_cache"] = from_cache;
  return j;
}

BackendResponse BackendResponse::from_json(const nlohmann::json& j) {
  BackendResponse r;
  if (j.contains("text")) r.text = j.at("text").get<std::string>();
  if (j.contains("frames")) r.frames = j.at("frames").get<std::vector<std::string>>();
  if (j.contains("token_scores"))
    r.token_scores = j.at("token_scores").get<std::map<std::string, double>>();
  if (j.contains("actions")) {
    std::vector<std::array<double, 3>> acts;
    for (const auto& a : j.at("actions")) {
      if (!a.is_array() || a.size() != 3) throw Error("action must be an [x,y,z] triple");
      acts.push_back({a[0].get<double>(), a[1].get<double>(), a[2].get<double>()});
    }
    r.actions = std::move(acts);
  }
  r.latency_ms = j.value("latency_ms", 0);
  r.from_cache = j.value("from_cache", false);
  return r;
}

std::string BackendResponse::payload_summary() const {
  if (text) return *text;
  if (frames) {
    std::string out;
    for (const auto& f : *frames) {
      if (!out.empty()) out += ",";
      out += f;
    }
    return out;
  }
  if (token_scores) {
    nlohmann::json j(*token_scores);
    return j.dump();
  }
  if (actions) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : *actions) arr.push_back({a[0], a[1], a[2]});
    return arr.dump();
  }
  return "";
}

std::string canonical_request_json(const BackendRequest& request) {
  nlohmann::json j;
  j["backend_id"] = request.backend_id;
  j["kind"] = to_string(request.kind);
  nlohmann::json msgs = nlohmann::json::array();
  for (const Message& m : request.messages) {
    nlohmann::json parts = nlohmann::json::array();
    for (const MessagePart& p : m.parts) {
      nlohmann::json part;
      if (p.text) part["text"] = *p.text;
      if (p.image_ref) part["image_ref"] = *p.image_ref;
      parts.push_back(std::move(part));
    }
    msgs.push_back({{"role", to_string(m.role)}, {"parts", std::move(parts)}});
  }
  j["messages"] = std::move(msgs);
  j["params"] = request.params;
  // nlohmann objects are key-sorted maps and dump() emits no whitespace,
  // so this string is canonical by construction.
  return j.dump();
}

std::string cache_key(const BackendRequest& request) {
  return sha256_hex(canonical_request_json(request));
}

double score_yes(const BackendResponse& response) {
  if (response.token_scores) {
    double yes_mass = 0.0;
    bool found = false;
    for (const auto& [token, prob] : *response.token_scores) {
      if (lower(trim(token)) == "yes") {
        yes_mass += prob;
        found = true;
      }
    }
    if (found) return std::clamp(yes_mass, 0.0, 1.0);
  }
  if (response.text) {
    const std::string t = lower(trim(*response.text));
    if (t.rfind("yes", 0) == 0) return 1.0;
    if (t.rfind("no", 0) == 0) return 0.0;
  }
  // A populated score map with no yes variant means the model put no mass
  // on "Yes" among its top tokens.
  if (response.token_scores) return 0.0;
  throw UnscorableError("response has neither token scores nor parseable yes/no text");
}

BackendResponse dispatch(Backend& backend, BackendRequest request) {
  request.backend_id = backend.id();
  request.validate();
  BackendResponse response = backend.call(request);
  response.validate(request.kind);
  return response;
}

double score_yes(Backend& backend, BackendRequest request) {
  if (request.kind != RequestKind::frame_score)
    throw Error("score_yes requires a frame_score request");
  return score_yes(dispatch(backend, std::move(request)));
}

}  // namespace vlp
