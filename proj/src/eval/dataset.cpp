#include "vlp/eval/dataset.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace vlp::eval {

namespace {

using nlohmann::json;

std::string require_string(const json& record, const char* field, int line) {
  if (!record.contains(field) || !record.at(field).is_string() ||
      record.at(field).get<std::string>().empty())
    throw SchemaViolationError(line, std::string("missing or empty string field '") + field + "'");
  return record.at(field).get<std::string>();
}

std::vector<std::string> require_string_array(const json& record, const char* field, int line,
                                              size_t min_size) {
  if (!record.contains(field) || !record.at(field).is_array())
    throw SchemaViolationError(line, std::string("missing array field '") + field + "'");
  std::vector<std::string> out;
  for (const auto& v : record.at(field)) {
    if (!v.is_string() || v.get<std::string>().empty())
      throw SchemaViolationError(line, std::string("field '") + field + "' has a non-string or empty entry");
    out.push_back(v.get<std::string>());
  }
  if (out.size() < min_size)
    throw SchemaViolationError(line, std::string("field '") + field + "' needs at least " +
                                         std::to_string(min_size) + " entries");
  return out;
}

int require_int(const json& record, const char* field, int line) {
  if (!record.contains(field) || !record.at(field).is_number_integer())
    throw SchemaViolationError(line, std::string("missing integer field '") + field + "'");
  return record.at(field).get<int>();
}

}  // namespace

const char* to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::mcq: return "mcq";
    case DatasetKind::caption: return "caption";
    case DatasetKind::trajectory: return "trajectory";
  }
  return "mcq";
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "mcq") return DatasetKind::mcq;
  if (s == "caption") return DatasetKind::caption;
  if (s == "trajectory") return DatasetKind::trajectory;
  throw ConfigError("unknown dataset kind: " + s);
}

std::size_t Dataset::size() const {
  switch (kind) {
    case DatasetKind::mcq: return mcq.size();
    case DatasetKind::caption: return caption.size();
    case DatasetKind::trajectory: return trajectory.size();
  }
  return 0;
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  switch (kind) {
    case DatasetKind::mcq:
      for (const auto& i : mcq) out.push_back(i.id);
      break;
    case DatasetKind::caption:
      for (const auto& i : caption) out.push_back(i.id);
      break;
    case DatasetKind::trajectory:
      for (const auto& i : trajectory) out.push_back(i.id);
      break;
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path.string());

  Dataset dataset;
  dataset.kind = kind;
  std::set<std::string> seen_ids;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaViolationError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw SchemaViolationError(line_no, "record must be a JSON object");

    const std::string id = require_string(record, "id", line_no);
    if (!seen_ids.insert(id).second)
      throw SchemaViolationError(line_no, "duplicate id '" + id + "'");

    switch (kind) {
      case DatasetKind::mcq: {
        McqItem item;
        item.id = id;
        // empty frames = language-only item; normalization synthesizes them
        item.frames = require_string_array(record, "frames", line_no, 0);
        item.question = require_string(record, "question", line_no);
        item.options = require_string_array(record, "options", line_no, 2);
        if (item.options.size() > 5)
          throw SchemaViolationError(line_no, "options must have 2-5 entries");
        item.answer_index = require_int(record, "answer", line_no);
        if (item.answer_index < 0 || item.answer_index >= static_cast<int>(item.options.size()))
          throw SchemaViolationError(line_no, "answer index " + std::to_string(item.answer_index) +
                                                  " out of range for " +
                                                  std::to_string(item.options.size()) + " options");
        item.category = require_string(record, "category", line_no);
        dataset.mcq.push_back(std::move(item));
        break;
      }
      case DatasetKind::caption: {
        CaptionItem item;
        item.id = id;
        item.frames = require_string_array(record, "frames", line_no, 1);
        item.references = require_string_array(record, "references", line_no, 1);
        dataset.caption.push_back(std::move(item));
        break;
      }
      case DatasetKind::trajectory: {
        TrajectoryItem item;
        item.id = id;
        item.frames = require_string_array(record, "frames", line_no, 1);
        if (!record.contains("xyz") || !record.at("xyz").is_array())
          throw SchemaViolationError(line_no, "missing array field 'xyz'");
        for (const auto& p : record.at("xyz")) {
          if (!p.is_array() || p.size() != 3 || !p.at(0).is_number() || !p.at(1).is_number() ||
              !p.at(2).is_number())
            throw SchemaViolationError(line_no, "xyz entries must be [x,y,z] numbers");
          item.xyz.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
        }
        if (item.xyz.size() != item.frames.size())
          throw SchemaViolationError(line_no, "xyz must align 1:1 with frames (" +
                                                  std::to_string(item.xyz.size()) + " vs " +
                                                  std::to_string(item.frames.size()) + ")");
        item.n_initial = require_int(record, "n_initial", line_no);
        item.n_goal = require_int(record, "n_goal", line_no);
        if (item.n_initial < 1) throw SchemaViolationError(line_no, "n_initial must be >= 1");
        if (item.n_goal < 0) throw SchemaViolationError(line_no, "n_goal must be >= 0");
        if (item.horizon() < 1)
          throw SchemaViolationError(line_no,
                                     "n_initial + n_goal leaves no frames to predict");
        dataset.trajectory.push_back(std::move(item));
        break;
      }
    }
  }
  return dataset;
}

}  // namespace vlp::eval
