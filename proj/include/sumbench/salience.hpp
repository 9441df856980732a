#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/text_pipeline.hpp"

namespace sumbench {

// Scorer contract: one score in [0,1] per sentence of the document.
using SalienceScorer = std::function<std::vector<double>(const Document&)>;

inline constexpr double kDefaultSuggestionRatio = 0.3;

struct SuggestionSet {
  std::string document_id;
  std::vector<PendingSuggestion> items;  // document order

  friend bool operator==(const SuggestionSet&, const SuggestionSet&) = default;
};

inline std::string suggestion_id(std::size_t sentence_index) {
  return "s" + std::to_string(sentence_index);
}

// Cosine between each sentence's content-lemma frequency vector and the
// document centroid, rescaled so the best sentence scores 1.
inline std::vector<double> score_builtin(const Document& doc) {
  const auto& sentences = doc.sentences();
  std::vector<std::map<std::string_view, double>> vectors(sentences.size());
  std::map<std::string_view, double> centroid;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& t : sentences[i].tokens) {
      if (!t.is_content()) continue;
      vectors[i][t.lemma] += 1.0;
      centroid[t.lemma] += 1.0;
    }
  }
  double centroid_norm = 0.0;
  for (const auto& [_, v] : centroid) centroid_norm += v * v;
  centroid_norm = std::sqrt(centroid_norm);

  std::vector<double> scores(sentences.size(), 0.0);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (vectors[i].empty() || centroid_norm == 0.0) continue;
    double dot = 0.0;
    double norm = 0.0;
    for (const auto& [lemma, v] : vectors[i]) {
      dot += v * centroid.at(lemma);
      norm += v * v;
    }
    scores[i] = dot / (std::sqrt(norm) * centroid_norm);
  }
  double best = scores.empty() ? 0.0 : *std::max_element(scores.begin(), scores.end());
  if (best > 0.0) {
    for (double& s : scores) s = std::clamp(s / best, 0.0, 1.0);
  }
  return scores;
}

// k = max(1, ceil(ratio * n)). The epsilon absorbs binary representation
// error, e.g. 0.3 * 10 must give 3, not 4.
inline std::size_t suggestion_count(std::size_t sentence_count, double ratio) {
  if (sentence_count == 0) return 0;
  double raw = std::ceil(ratio * static_cast<double>(sentence_count) - 1e-9);
  auto k = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(k, sentence_count);
}

inline SuggestionSet suggest(const Document& doc, const SalienceScorer& scorer,
                             double ratio = kDefaultSuggestionRatio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::validation, "suggestion ratio must lie in (0, 1]");
  }
  SuggestionSet out{doc.id(), {}};
  const auto n = doc.sentences().size();
  if (n == 0) return out;

  std::vector<double> scores = scorer(doc);
  if (scores.size() != n) {
    throw Error(ErrorCode::protocol, "scorer returned " + std::to_string(scores.size()) +
                                         " scores for " + std::to_string(n) + " sentences");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(suggestion_count(n, ratio));
  std::sort(order.begin(), order.end());

  for (std::size_t idx : order) {
    out.items.push_back(
        {suggestion_id(idx), doc.sentences()[idx].span, std::clamp(scores[idx], 0.0, 1.0)});
  }
  return out;
}

inline SuggestionSet suggest(const Document& doc, double ratio = kDefaultSuggestionRatio) {
  return suggest(doc, SalienceScorer(score_builtin), ratio);
}

}  // namespace sumbench
