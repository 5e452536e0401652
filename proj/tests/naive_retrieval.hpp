#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "effront/text.hpp"

namespace effront::testing {

// Dense tf-idf cosine ranking by full sort, written without the model class.
struct NaiveRanking {
  std::vector<double> scores;
  std::vector<std::size_t> order;
};

inline NaiveRanking naive_query_ranking(const std::vector<std::string>& docs, const std::string& query) {
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::map<std::string, double> df;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : tokenize_terms(docs[d])) tf[d][t] += 1;
  }
  for (const auto& m : tf) {
    for (const auto& [t, _] : m) df[t] += 1;
  }
  const double n = static_cast<double>(docs.size());
  auto weights = [&](const std::map<std::string, double>& counts) {
    std::map<std::string, double> w;
    double norm = 0;
    for (const auto& [t, c] : counts) {
      auto it = df.find(t);
      if (it == df.end()) continue;
      const double x = c * (std::log(n / it->second) + 1);
      w[t] = x;
      norm += x * x;
    }
    for (auto& [_, x] : w) x /= std::sqrt(norm);
    return w;
  };
  std::map<std::string, double> qtf;
  for (const auto& t : tokenize_terms(query)) qtf[t] += 1;
  const auto q = weights(qtf);

  NaiveRanking out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto w = weights(tf[d]);
    double s = 0;
    for (const auto& [t, x] : q) {
      auto it = w.find(t);
      if (it != w.end()) s += x * it->second;
    }
    out.scores.push_back(s);
  }
  out.order.resize(docs.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    if (out.scores[a] != out.scores[b]) return out.scores[a] > out.scores[b];
    return a < b;
  });
  return out;
}

}  // namespace effront::testing
