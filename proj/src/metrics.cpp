#include "effront/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "effront/text.hpp"

namespace effront {

std::vector<std::string> normalize_answer(std::string_view text) {
  auto tokens = tokenize_terms(text);
  std::erase_if(tokens, [](const std::string& t) { return t == "a" || t == "an" || t == "the"; });
  return tokens;
}

AnswerScore answer_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = normalize_answer(prediction);
  const auto ref = normalize_answer(gold);
  AnswerScore s;
  s.em = pred == ref ? 1.0 : 0.0;
  if (pred.empty() || ref.empty()) {
    s.f1 = s.em;
    return s;
  }
  std::map<std::string_view, int> counts;
  for (const auto& t : ref) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return s;
  // 2PR / (P + R) with a single rounding.
  s.f1 = 2.0 * common / static_cast<double>(pred.size() + ref.size());
  return s;
}

AggregateScore aggregate_scores(std::span<const AnswerScore> scores) {
  if (scores.empty()) throw std::invalid_argument("cannot aggregate an empty score list");
  AggregateScore agg;
  for (const auto& s : scores) {
    agg.mean_f1 += s.f1;
    agg.mean_em += s.em;
  }
  const auto n = static_cast<double>(scores.size());
  agg.mean_f1 /= n;
  agg.mean_em /= n;
  return agg;
}

}  // namespace effront
