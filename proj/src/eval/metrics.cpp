#include "vlp/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace vlp::eval {

namespace {

constexpr int kMaxOrder = 4;

using GramCounts = std::unordered_map<std::string, int>;

// n-gram key as tokens joined with a separator that cannot occur in them.
GramCounts ngrams(const std::vector<std::string>& tokens, int n) {
  GramCounts counts;
  const int count = static_cast<int>(tokens.size()) - n + 1;
  for (int i = 0; i < count; ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::vector<std::vector<std::string>> tokenize_all(const std::vector<std::string>& texts) {
  std::vector<std::vector<std::string>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(tokenize(t));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double bleu4_corpus(const std::vector<std::string>& candidates,
                    const std::vector<std::vector<std::string>>& references,
                    const BleuOptions& options) {
  if (candidates.size() != references.size())
    throw LengthMismatchError("bleu4: candidate/reference count mismatch");

  std::array<long long, kMaxOrder + 1> matched{};
  std::array<long long, kMaxOrder + 1> total{};
  long long cand_len = 0;
  long long eff_ref_len = 0;

  for (size_t item = 0; item < candidates.size(); ++item) {
    if (references[item].empty()) throw Error("bleu4: item without references");
    const std::vector<std::string> cand = tokenize(candidates[item]);
    const std::vector<std::vector<std::string>> refs = tokenize_all(references[item]);

    cand_len += static_cast<long long>(cand.size());
    long long closest = static_cast<long long>(refs.front().size());
    for (const auto& ref : refs) {
      const long long len = static_cast<long long>(ref.size());
      const long long d_new = std::llabs(len - static_cast<long long>(cand.size()));
      const long long d_old = std::llabs(closest - static_cast<long long>(cand.size()));
      if (d_new < d_old || (d_new == d_old && len < closest)) closest = len;
    }
    eff_ref_len += closest;

    for (int n = 1; n <= kMaxOrder; ++n) {
      GramCounts max_ref;
      for (const auto& ref : refs)
        for (const auto& [gram, count] : ngrams(ref, n))
          max_ref[gram] = std::max(max_ref[gram], count);
      for (const auto& [gram, count] : ngrams(cand, n)) {
        const auto it = max_ref.find(gram);
        matched[n] += std::min(count, it == max_ref.end() ? 0 : it->second);
      }
      if (static_cast<int>(cand.size()) >= n)
        total[n] += static_cast<long long>(cand.size()) - n + 1;
    }
  }

  double log_precision_sum = 0.0;
  for (int n = 1; n <= kMaxOrder; ++n) {
    double m = static_cast<double>(matched[n]);
    double l = static_cast<double>(total[n]);
    if (options.smooth_add1 && n >= 2 && m == 0.0) {
      m += 1.0;
      l += 1.0;
    }
    if (m <= 0.0 || l <= 0.0) return 0.0;
    log_precision_sum += std::log(m / l) / kMaxOrder;
  }

  if (cand_len == 0) return 0.0;
  const double bp =
      cand_len >= eff_ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(eff_ref_len) / static_cast<double>(cand_len));
  return bp * std::exp(log_precision_sum);
}

double bleu4(const std::string& candidate, const std::vector<std::string>& references,
             const BleuOptions& options) {
  if (references.empty()) throw Error("bleu4 requires references");
  return bleu4_corpus({candidate}, {references}, options);
}

double cider_corpus(const std::vector<std::string>& candidates,
                    const std::vector<std::vector<std::string>>& references) {
  if (candidates.size() != references.size())
    throw LengthMismatchError("cider: candidate/reference count mismatch");
  const size_t items = candidates.size();
  if (items < 2) throw CorpusTooSmallError("cider requires >= 2 items for idf");

  // Document frequency per order: number of items whose references
  // contain the n-gram at least once.
  std::array<GramCounts, kMaxOrder + 1> df;
  for (size_t item = 0; item < items; ++item) {
    if (references[item].empty()) throw Error("cider: item without references");
    for (int n = 1; n <= kMaxOrder; ++n) {
      GramCounts seen;
      for (const std::string& ref : references[item])
        for (const auto& [gram, count] : ngrams(tokenize(ref), n)) seen[gram] = 1;
      for (const auto& [gram, one] : seen) ++df[n][gram];
    }
  }

  const double log_items = std::log(static_cast<double>(items));
  auto idf = [&](int n, const std::string& gram) {
    const auto it = df[n].find(gram);
    const int d = std::max(1, it == df[n].end() ? 0 : it->second);
    return log_items - std::log(static_cast<double>(d));
  };

  double corpus = 0.0;
  for (size_t item = 0; item < items; ++item) {
    const std::vector<std::string> cand = tokenize(candidates[item]);
    double item_score = 0.0;

    for (int n = 1; n <= kMaxOrder; ++n) {
      std::unordered_map<std::string, double> cand_vec;
      double cand_norm = 0.0;
      for (const auto& [gram, count] : ngrams(cand, n)) {
        const double w = count * idf(n, gram);
        cand_vec[gram] = w;
        cand_norm += w * w;
      }
      cand_norm = std::sqrt(cand_norm);

      double cos_sum = 0.0;
      for (const std::string& ref : references[item]) {
        double dot = 0.0;
        double ref_norm = 0.0;
        for (const auto& [gram, count] : ngrams(tokenize(ref), n)) {
          const double w = count * idf(n, gram);
          ref_norm += w * w;
          const auto it = cand_vec.find(gram);
          if (it != cand_vec.end()) dot += it->second * w;
        }
        ref_norm = std::sqrt(ref_norm);
        cos_sum += (cand_norm > 0.0 && ref_norm > 0.0) ? dot / (cand_norm * ref_norm) : 0.0;
      }
      item_score += cos_sum / static_cast<double>(references[item].size()) / kMaxOrder;
    }
    corpus += 10.0 * item_score;
  }
  return corpus / static_cast<double>(items);
}

namespace {

// Stem match: equal, or one token is the other plus a common suffix.
bool stems_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const std::string& base = a.size() <= b.size() ? a : b;
  const std::string& extended = a.size() <= b.size() ? b : a;
  if (base.size() < 3 || !extended.starts_with(base)) return false;
  static const std::array<const char*, 6> suffixes = {"s", "es", "d", "ed", "ing", "ly"};
  const std::string tail = extended.substr(base.size());
  return std::any_of(suffixes.begin(), suffixes.end(),
                     [&tail](const char* s) { return tail == s; });
}

double meteor_against(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;

  std::vector<int> alignment(cand.size(), -1);
  std::vector<bool> used(ref.size(), false);
  auto align_stage = [&](auto&& matches) {
    for (size_t i = 0; i < cand.size(); ++i) {
      if (alignment[i] >= 0) continue;
      for (size_t j = 0; j < ref.size(); ++j) {
        if (used[j] || !matches(cand[i], ref[j])) continue;
        alignment[i] = static_cast<int>(j);
        used[j] = true;
        break;
      }
    }
  };
  align_stage([](const std::string& a, const std::string& b) { return a == b; });
  align_stage(stems_match);

  const int matches = static_cast<int>(std::count_if(
      alignment.begin(), alignment.end(), [](int j) { return j >= 0; }));
  if (matches == 0) return 0.0;

  const double precision = static_cast<double>(matches) / cand.size();
  const double recall = static_cast<double>(matches) / ref.size();
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);

  int chunks = 0;
  int previous = -2;
  for (const int j : alignment) {
    if (j < 0) {
      previous = -2;
      continue;
    }
    if (j != previous + 1) ++chunks;
    previous = j;
  }
  const double fragmentation = static_cast<double>(chunks) / matches;
  return fmean * (1.0 - 0.5 * fragmentation * fragmentation * fragmentation);
}

}  // namespace

double meteor_lite(const std::string& candidate, const std::vector<std::string>& references) {
  if (references.empty()) throw Error("meteor_lite requires references");
  const std::vector<std::string> cand = tokenize(candidate);
  double best = 0.0;
  for (const std::string& ref : references)
    best = std::max(best, meteor_against(cand, tokenize(ref)));
  return best;
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw LengthMismatchError("rmse: sequences must be equal nonzero length");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double tolerant_accuracy(std::span<const double> pred, std::span<const double> truth,
                         double sigma) {
  if (pred.size() != truth.size() || pred.empty())
    throw LengthMismatchError("tolerant_accuracy: sequences must be equal nonzero length");
  if (sigma <= 0.0) throw Error("tolerant_accuracy requires sigma > 0");
  size_t within = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    if (std::abs(pred[i] - truth[i]) <= sigma) ++within;
  return static_cast<double>(within) / static_cast<double>(pred.size());
}

McqAccuracyReport mcq_accuracy(const std::vector<McqScoredItem>& items) {
  McqAccuracyReport report;
  for (const McqScoredItem& item : items) {
    CategoryCount& bucket = report.per_category[item.category];
    ++bucket.total;
    ++report.total;
    if (item.predicted && *item.predicted == item.answer_index) {
      ++bucket.correct;
      ++report.correct;
    }
  }
  return report;
}

}  // namespace vlp::eval
