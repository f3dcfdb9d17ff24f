#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlp/errors.hpp"

namespace vlp::eval {

// Lowercase tokens split on non-alphanumerics; the tokenizer every text
// metric in this module uses.
std::vector<std::string> tokenize(const std::string& text);

struct BleuOptions {
  // Replaces a zero higher-order numerator with (m+1)/(l+1). Off by
  // default: corpus-level scoring rarely needs it and the unsoothed value
  // is the documented contract.
  bool smooth_add1 = false;
};

// Corpus-level BLEU-4: clipped modified precisions for n=1..4, geometric
// mean, brevity penalty against the closest reference length.
double bleu4_corpus(const std::vector<std::string>& candidates,
                    const std::vector<std::vector<std::string>>& references,
                    const BleuOptions& options = {});

// Single-pair convenience: a corpus of one.
double bleu4(const std::string& candidate, const std::vector<std::string>& references,
             const BleuOptions& options = {});

// Consensus captioning score: tf-idf weighted n-gram cosine per n=1..4,
// averaged and scaled by 10; idf comes from the reference corpus of the
// evaluated set. Needs >= 2 items for a defined idf.
double cider_corpus(const std::vector<std::string>& candidates,
                    const std::vector<std::vector<std::string>>& references);

// Unigram precision/recall harmonic mean (recall weighted 9:1) over exact
// plus suffix-stem matches, with the 0.5*(chunks/matches)^3 fragmentation
// penalty. Synonym matching is deliberately omitted; scores are not
// comparable to WordNet-backed METEOR.
double meteor_lite(const std::string& candidate, const std::vector<std::string>& references);

double rmse(std::span<const double> pred, std::span<const double> truth);

// Fraction of positions with |pred - truth| <= sigma.
double tolerant_accuracy(std::span<const double> pred, std::span<const double> truth,
                         double sigma);

struct CategoryCount {
  int correct = 0;
  int total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct McqAccuracyReport {
  std::map<std::string, CategoryCount> per_category;
  int correct = 0;
  int total = 0;
  double average() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct McqScoredItem {
  std::string id;
  std::string category;
  int answer_index = 0;
  std::optional<int> predicted;  // absent = abstention, scored incorrect
};

McqAccuracyReport mcq_accuracy(const std::vector<McqScoredItem>& items);

}  // namespace vlp::eval
