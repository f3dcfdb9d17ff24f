#include "vlp/eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vlp::eval {

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string sigma_label(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", sigma);
  return buf;
}

void markdown_row(std::ostringstream& out, const std::vector<std::string>& cells) {
  out << "|";
  for (const std::string& c : cells) out << " " << c << " |";
  out << "\n";
}

void markdown_rule(std::ostringstream& out, size_t columns) {
  out << "|";
  for (size_t i = 0; i < columns; ++i) out << "---|";
  out << "\n";
}

}  // namespace

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["count"] = count;
  if (accuracy) {
    nlohmann::json acc;
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [category, bucket] : accuracy->per_category)
      cats[category] = {{"accuracy", bucket.accuracy()},
                        {"correct", bucket.correct},
                        {"total", bucket.total}};
    acc["per_category"] = std::move(cats);
    acc["category_order"] = category_order;
    acc["average"] = accuracy->average();
    acc["correct"] = accuracy->correct;
    acc["total"] = accuracy->total;
    j["accuracy"] = std::move(acc);
  }
  if (bleu4) j["bleu4"] = *bleu4;
  if (cider) j["cider"] = *cider;
  if (meteor) j["meteor"] = *meteor;
  if (rmse_xyz_sum) {
    j["rmse"] = {{"x", (*rmse_xyz_sum)[0]},
                 {"y", (*rmse_xyz_sum)[1]},
                 {"z", (*rmse_xyz_sum)[2]},
                 {"sum", (*rmse_xyz_sum)[3]}};
  }
  if (!a_sigma.empty()) {
    nlohmann::json sig = nlohmann::json::object();
    for (const auto& [sigma, fraction] : a_sigma) sig[sigma_label(sigma)] = fraction;
    j["a_sigma"] = std::move(sig);
  }
  return j;
}

std::string MetricReport::to_markdown() const {
  std::ostringstream out;

  if (accuracy) {
    std::vector<std::string> header = {"Items"};
    std::vector<std::string> row = {std::to_string(count)};
    for (const std::string& category : category_order) {
      const auto it = accuracy->per_category.find(category);
      if (it == accuracy->per_category.end()) continue;
      header.push_back(category);
      row.push_back(pct(it->second.accuracy()));
    }
    header.push_back("Avg.");
    row.push_back(pct(accuracy->average()));
    markdown_row(out, header);
    markdown_rule(out, header.size());
    markdown_row(out, row);
  }

  if (bleu4 || cider || meteor) {
    if (out.tellp() > 0) out << "\n";
    markdown_row(out, {"B", "C", "M"});
    markdown_rule(out, 3);
    markdown_row(out, {bleu4 ? pct(*bleu4) : "-", cider ? pct(*cider) : "-",
                       meteor ? pct(*meteor) : "-"});
  }

  if (rmse_xyz_sum) {
    if (out.tellp() > 0) out << "\n";
    markdown_row(out, {"X", "Y", "Z", "Sum"});
    markdown_rule(out, 4);
    markdown_row(out, {fixed2((*rmse_xyz_sum)[0]), fixed2((*rmse_xyz_sum)[1]),
                       fixed2((*rmse_xyz_sum)[2]), fixed2((*rmse_xyz_sum)[3])});
  }

  if (!a_sigma.empty()) {
    if (out.tellp() > 0) out << "\n";
    std::vector<std::string> header;
    std::vector<std::string> row;
    for (const auto& [sigma, fraction] : a_sigma) {
      header.push_back("A_" + sigma_label(sigma));
      row.push_back(pct(fraction));
    }
    markdown_row(out, header);
    markdown_rule(out, header.size());
    markdown_row(out, row);
  }

  return out.str();
}

}  // namespace vlp::eval
