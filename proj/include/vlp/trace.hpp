#pragma once

#include <string>
#include <vector>

namespace vlp {

// One recorded backend exchange. `stage` names the protocol step
// ("vanilla", "cs", "frame_score", ...), `request_digest` is the canonical
// cache key, `frame_indices` lists the temporal indices of attached frames.
struct Round {
  std::string stage;
  std::string request_digest;
  std::string response_text;
  std::vector<int> frame_indices;
};

struct Trace {
  std::vector<Round> rounds;

  int add(std::string stage, std::string digest, std::string response_text,
          std::vector<int> frame_indices = {}) {
    rounds.push_back(Round{std::move(stage), std::move(digest), std::move(response_text),
                           std::move(frame_indices)});
    return static_cast<int>(rounds.size()) - 1;
  }
};

}  // namespace vlp
