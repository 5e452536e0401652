#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace effront {

struct AnswerScore {
  double f1 = 0.0;
  double em = 0.0;
};

/// SQuAD-style normalization: lowercase, strip punctuation, drop the articles
/// "a", "an", "the", collapse whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

/// Multiset token-overlap F1 and exact match over normalized answers.
/// Two empty answers score 1/1; exactly one empty answer scores 0.
AnswerScore answer_f1(std::string_view prediction, std::string_view gold);

struct AggregateScore {
  double mean_f1 = 0.0;
  double mean_em = 0.0;
};

/// Throws std::invalid_argument on an empty list.
AggregateScore aggregate_scores(std::span<const AnswerScore> scores);

}  // namespace effront
