#include "effront/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace effront {

double effective_tokens(double stage1, double stage2, ReuseLevel reuse) {
  if (!(stage2 > 0.0)) throw std::invalid_argument("stage2 tokens must be positive");
  if (!(stage1 >= 0.0)) throw std::invalid_argument("stage1 tokens must be nonnegative");
  return stage2 + stage1 / static_cast<double>(reuse.n());
}

double log_cost(double effective_tokens) { return std::log(effective_tokens); }

OperatingPoint project(const EvaluationRecord& record, std::size_t record_index, ReuseLevel reuse) {
  OperatingPoint p;
  p.record_index = record_index;
  p.strategy = record.strategy;
  p.config = record.config;
  p.reuse = reuse;
  p.effective_tokens = effective_tokens(record.stage1_tokens, record.stage2_tokens, reuse);
  p.log_cost = log_cost(p.effective_tokens);
  p.f1 = record.f1;
  return p;
}

double efficiency_score(double f1, double log_cost, double w) {
  return w * f1 - (1.0 - w) * log_cost;
}

double efficiency_score(const OperatingPoint& point, PreferenceWeight weight) {
  if (!(point.effective_tokens > 0.0)) {
    throw std::invalid_argument("effective tokens must be positive");
  }
  return efficiency_score(point.f1, point.log_cost, weight.value());
}

ScoredCandidate score_candidate(const OperatingPoint& point, PreferenceWeight weight) {
  return {point, weight, efficiency_score(point, weight)};
}

std::optional<double> crossover_weight_unbounded(double f1_a, double log_cost_a, double f1_b,
                                                 double log_cost_b) {
  const double dl = log_cost_b - log_cost_a;
  const double denom = (f1_b - f1_a) + dl;
  if (denom == 0.0) return std::nullopt;
  return dl / denom;
}

std::optional<double> crossover_weight(const OperatingPoint& a, const OperatingPoint& b) {
  auto w = crossover_weight_unbounded(a.f1, a.log_cost, b.f1, b.log_cost);
  if (!w || !(*w >= 0.0 && *w <= 1.0)) return std::nullopt;
  return w;
}

}  // namespace effront
