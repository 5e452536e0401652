#pragma once

#include <optional>

#include "effront/domain.hpp"

namespace effront {

/// Amortized per-query cost: stage2 + stage1 / N.
/// Throws std::invalid_argument when stage2 <= 0 or stage1 < 0.
double effective_tokens(double stage1, double stage2, ReuseLevel reuse);

/// The cost penalty's logarithm. Natural log; changing the base only rescales
/// the cost axis, so it is kept in this one place.
double log_cost(double effective_tokens);

OperatingPoint project(const EvaluationRecord& record, std::size_t record_index, ReuseLevel reuse);

/// w * f1 - (1 - w) * log_cost
double efficiency_score(double f1, double log_cost, double w);
double efficiency_score(const OperatingPoint& point, PreferenceWeight weight);

struct ScoredCandidate {
  OperatingPoint point;
  PreferenceWeight weight;
  double score;
};

ScoredCandidate score_candidate(const OperatingPoint& point, PreferenceWeight weight);

/// Weight at which the two score lines are equal, if that happens inside [0,1].
/// Returns nullopt for parallel or coincident lines and for crossings outside [0,1].
std::optional<double> crossover_weight(const OperatingPoint& a, const OperatingPoint& b);

/// Unclamped closed form (L_b - L_a) / ((F1_b - F1_a) + (L_b - L_a)); nullopt if parallel.
std::optional<double> crossover_weight_unbounded(double f1_a, double log_cost_a, double f1_b,
                                                 double log_cost_b);

}  // namespace effront
