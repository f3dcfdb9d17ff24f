#pragma once

#include <atomic>
#include <memory>
#include <filesystem>
#include <mutex>
#include <regex>
#include <string>
#include <vector>

#include "vlp/backend.hpp"

namespace vlp {

// One scripted rule: first rule whose kind and regex match wins.
struct MockRule {
  std::optional<RequestKind> kind;  // absent = any kind
  std::string pattern;
  std::regex regex;
  BackendResponse response;
  // video_gen convenience: expand "{i}" to 0..n_frames-1 instead of a
  // literal frame list.
  std::optional<std::string> frame_pattern;
};

// Deterministic scripted backend. Rules are ordered; an unmatched request
// is a hard ScriptMissError, never a silent default.
class MockBackend : public Backend {
 public:
  MockBackend(std::string id, std::vector<MockRule> rules)
      : id_(std::move(id)), rules_(std::move(rules)) {}

  static std::unique_ptr<MockBackend> from_file(const std::filesystem::path& script,
                                                std::string id = "");
  static std::vector<MockRule> parse_rules(const nlohmann::json& doc);

  BackendResponse call(const BackendRequest& request) override;
  std::string id() const override { return id_; }
  std::uint64_t calls() const override { return calls_.load(); }

  // Every request served, in order. Test instrumentation.
  std::vector<BackendRequest> history() const;

 private:
  std::string id_;
  std::vector<MockRule> rules_;
  std::atomic<std::uint64_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<BackendRequest> history_;
};

}  // namespace vlp
