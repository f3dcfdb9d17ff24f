#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "vlp/errors.hpp"

namespace vlp::eval {

enum class DatasetKind { mcq, caption, trajectory };

const char* to_string(DatasetKind k);
DatasetKind dataset_kind_from_string(const std::string& s);

struct McqItem {
  std::string id;
  std::vector<std::string> frames;
  std::string question;
  std::vector<std::string> options;  // 2-5
  int answer_index = 0;
  std::string category;
};

struct CaptionItem {
  std::string id;
  std::vector<std::string> frames;
  std::vector<std::string> references;
};

struct TrajectoryItem {
  std::string id;
  std::vector<std::string> frames;
  std::vector<std::array<double, 3>> xyz;  // aligned 1:1 with frames, cm
  int n_initial = 1;
  int n_goal = 0;

  int horizon() const {
    return static_cast<int>(frames.size()) - n_initial - n_goal;
  }
};

struct Dataset {
  DatasetKind kind = DatasetKind::mcq;
  std::vector<McqItem> mcq;
  std::vector<CaptionItem> caption;
  std::vector<TrajectoryItem> trajectory;

  std::size_t size() const;
  std::vector<std::string> ids() const;
};

// Parses the JSONL schema for `kind`, validating every record; the first
// malformed record raises SchemaViolationError with its line number.
Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind);

}  // namespace vlp::eval
