#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <thread>

#include "test_util.hpp"
#include "vlp/http_backend.hpp"

using namespace vlp;

namespace {

// Minimal chat-completions server for wire tests.
class TestServer {
 public:
  explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", handler);
    server_.Post("/v1/videos/generations", handler);
    server_.Post("/v1/actions/predictions", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackendConfig fast_config(const std::string& base_url) {
  HttpBackendConfig cfg;
  cfg.base_url = base_url;
  cfg.model = "test-model";
  cfg.max_attempts = 3;
  cfg.backoff_ms = 1;
  cfg.timeout_ms = 2000;
  return cfg;
}

BackendRequest chat_request(const std::string& text) {
  BackendRequest r;
  r.kind = RequestKind::text_gen;
  r.messages = {{Role::user, {text_part(text)}}};
  return r;
}

}  // namespace

TEST_CASE("http backend speaks the chat completions wire format") {
  nlohmann::json seen_body;
  TestServer server([&seen_body](const httplib::Request& req, httplib::Response& res) {
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(
        nlohmann::json{{"choices", {{{"message", {{"content", "hello back"}}}}}}}.dump(),
        "application/json");
  });
  HttpBackend backend(fast_config(server.base_url()));

  BackendRequest req = chat_request("hello");
  req.messages[0].parts.push_back(image_part("frames/0.jpg"));
  const BackendResponse resp = dispatch(backend, req);

  CHECK(*resp.text == "hello back");
  CHECK(seen_body.at("model") == "test-model");
  const auto& content = seen_body.at("messages").at(0).at("content");
  CHECK(content.at(0).at("type") == "text");
  CHECK(content.at(1).at("type") == "image_url");
  CHECK(content.at(1).at("image_url").at("url") == "frames/0.jpg");
  CHECK(backend.transport_ops() == 1);
}

TEST_CASE("http backend surfaces token scores from logprobs") {
  TestServer server([](const httplib::Request&, httplib::Response& res) {
    const nlohmann::json body = {
        {"choices",
         {{{"message", {{"content", "Yes"}}},
           {"logprobs",
            {{"content",
              {{{"token", "Yes"},
                {"logprob", -0.2231435513},
                {"top_logprobs",
                 {{{"token", "Yes"}, {"logprob", -0.2231435513}},
                  {{"token", "No"}, {"logprob", -1.6094379124}}}}}}}}}}}}};
    res.set_content(body.dump(), "application/json");
  });
  HttpBackend backend(fast_config(server.base_url()));

  BackendRequest req;
  req.kind = RequestKind::frame_score;
  req.messages = {{Role::user, {image_part("f.jpg"), text_part("relevant?")}}};
  req.params["want_token_scores"] = true;

  const BackendResponse resp = dispatch(backend, req);
  REQUIRE(resp.token_scores.has_value());
  CHECK(resp.token_scores->at("Yes") == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(resp.token_scores->at("No") == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(score_yes(resp) == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("http backend retries transient failures with bounded attempts") {
  std::atomic<int> hits{0};
  TestServer server([&hits](const httplib::Request&, httplib::Response& res) {
    const int n = ++hits;
    if (n < 3) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
      return;
    }
    res.set_content(
        nlohmann::json{{"choices", {{{"message", {{"content", "recovered"}}}}}}}.dump(),
        "application/json");
  });
  HttpBackend backend(fast_config(server.base_url()));

  const BackendResponse resp = dispatch(backend, chat_request("retry me"));
  CHECK(*resp.text == "recovered");
  CHECK(hits.load() == 3);
  CHECK(backend.transport_ops() == 3);
}

TEST_CASE("http backend gives up after max attempts") {
  std::atomic<int> hits{0};
  TestServer server([&hits](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  HttpBackend backend(fast_config(server.base_url()));
  CHECK_THROWS_AS(dispatch(backend, chat_request("always down")), TransportError);
  CHECK(hits.load() == 3);
}

TEST_CASE("non-retryable statuses and malformed bodies fail fast") {
  std::atomic<int> hits{0};
  TestServer bad_status([&hits](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  HttpBackend unauthorized(fast_config(bad_status.base_url()));
  CHECK_THROWS_AS(dispatch(unauthorized, chat_request("x")), TransportError);
  CHECK(hits.load() == 1);  // no retries on 401

  TestServer garbled([](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json at all", "application/json");
  });
  HttpBackend protocol(fast_config(garbled.base_url()));
  CHECK_THROWS_AS(dispatch(protocol, chat_request("x")), ProtocolError);
}

TEST_CASE("video and action endpoints use their own wire shapes") {
  TestServer server([](const httplib::Request& req, httplib::Response& res) {
    if (req.path == "/v1/videos/generations") {
      const auto body = nlohmann::json::parse(req.body);
      CHECK(body.at("n_frames") == 2);
      CHECK(body.at("frames").size() == 1);
      res.set_content(nlohmann::json{{"frames", {"gen0.jpg", "gen1.jpg"}}}.dump(),
                      "application/json");
    } else {
      const auto body = nlohmann::json::parse(req.body);
      CHECK(body.at("horizon") == 2);
      res.set_content(nlohmann::json{{"actions", {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}}}}.dump(),
                      "application/json");
    }
  });
  HttpBackend backend(fast_config(server.base_url()));

  BackendRequest video;
  video.kind = RequestKind::video_gen;
  video.messages = {{Role::user, {image_part("seed.jpg")}}};
  video.params["n_frames"] = 2;
  const BackendResponse vr = dispatch(backend, video);
  REQUIRE(vr.frames.has_value());
  CHECK(vr.frames->size() == 2);

  BackendRequest action;
  action.kind = RequestKind::action_pred;
  action.messages = {{Role::user, {image_part("seed.jpg")}}};
  action.params["horizon"] = 2;
  const BackendResponse ar = dispatch(backend, action);
  REQUIRE(ar.actions.has_value());
  CHECK(ar.actions->size() == 2);
  CHECK((*ar.actions)[1][2] == doctest::Approx(0.6));
}

TEST_CASE("auth header comes from the configured environment variable") {
  std::string seen_auth;
  TestServer server([&seen_auth](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    res.set_content(nlohmann::json{{"choices", {{{"message", {{"content", "ok"}}}}}}}.dump(),
                    "application/json");
  });
  ::setenv("VLP_TEST_TOKEN", "sekrit", 1);
  HttpBackendConfig cfg = fast_config(server.base_url());
  cfg.auth_env = "VLP_TEST_TOKEN";
  HttpBackend backend(cfg);
  dispatch(backend, chat_request("x"));
  CHECK(seen_auth == "Bearer sekrit");
  ::unsetenv("VLP_TEST_TOKEN");
}
