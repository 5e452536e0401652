#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effront/domain.hpp"

namespace effront {

/// Deterministic candidate order used to break exact ties: strategy tag, then
/// canonical config id, then record index. Negative when a sorts first.
int compare_identity(const OperatingPoint& a, const OperatingPoint& b);

/// Strict preference at weight w: higher score; on equal scores, fewer effective
/// tokens, then higher F1, then compare_identity. The F1 key only matters at
/// w = 0, where equal-cost points tie regardless of F1.
bool preferred_at(const OperatingPoint& a, const OperatingPoint& b, double w);

/// Index of the preferred candidate at w. Throws std::invalid_argument if empty.
std::size_t best_at(std::span<const OperatingPoint> points, double w);

/// Non-dominated points sorted by effective tokens. Of exactly duplicated
/// (F1, tokens) points only the compare_identity-first one is kept.
std::vector<OperatingPoint> pareto_filter(std::span<const OperatingPoint> points);

/// One piece of the upper envelope of the score lines over w.
///
/// A crossover weight belongs to the segment on its left, whose winner is the
/// cheaper of the two, so the first segment is [0, w_hi] and every later one
/// is (w_lo, w_hi]. Together they partition [0, 1].
struct FrontierSegment {
  double w_lo = 0.0;
  double w_hi = 1.0;
  OperatingPoint winner;
  /// Candidates with exactly the winner's F1 and effective tokens.
  std::vector<OperatingPoint> co_optimal;

  bool contains(double w) const { return w_lo == 0.0 ? w <= w_hi : (w > w_lo && w <= w_hi); }
};

struct EnvelopePiece {
  double w_lo;
  double w_hi;
  std::size_t winner;
};

/// Exact upper envelope of w -> w*F1 - (1-w)*log_cost over [0,1], found by
/// walking pairwise crossover weights from w = 0 (each step moves to a line
/// of strictly larger slope F1 + log_cost). O(n * segments).
std::vector<EnvelopePiece> upper_envelope(std::span<const OperatingPoint> points);

/// Winner of the segment containing w. Segments must partition [0,1].
const OperatingPoint& winner_at(std::span<const FrontierSegment> segments, double w);

enum class ExclusionReason {
  /// Another point has F1 >= and tokens <= with one strict.
  ParetoDominated,
  /// Same F1 and tokens as a kept point that sorts first.
  Duplicate,
  /// Pareto-optimal, but at every w some convex combination of two retained
  /// points scores higher (the witnesses are the envelope pair it sits below).
  BelowEnvelope,
  /// Never strictly worse than the envelope, but loses every tie.
  TieLoser,
};

std::string_view to_string(ExclusionReason reason);

struct Exclusion {
  OperatingPoint point;
  ExclusionReason reason;
  std::vector<OperatingPoint> witnesses;
};

struct StrategyFrontier {
  StrategyKind strategy = StrategyKind::FullContext;
  ReuseLevel reuse{1};
  /// Points that win some w, sorted by effective tokens.
  std::vector<OperatingPoint> retained;
  std::vector<FrontierSegment> segments;
  std::vector<Exclusion> excluded;
};

/// Stage 1: the configurations of one strategy that maximize the efficiency
/// score for some w, with the induced segments and a witness for every
/// excluded point. Throws std::invalid_argument if empty.
StrategyFrontier stage1_optimize(std::span<const OperatingPoint> points);

/// Stage 2: project every record at the reuse level, in record order.
std::vector<OperatingPoint> stage2_score(std::span<const EvaluationRecord> records, ReuseLevel reuse);

/// Stage 3: global envelope over the union of the strategies' retained points.
std::vector<FrontierSegment> stage3_global(std::span<const StrategyFrontier> frontiers);

/// Envelope over arbitrary points with co-optimal annotation drawn from `points`.
std::vector<FrontierSegment> global_frontier(std::span<const OperatingPoint> points);

/// Total length of the w-intervals won by a strategy.
double winning_measure(std::span<const FrontierSegment> segments, StrategyKind strategy);

inline const std::vector<double> kDefaultF1Breaks = {0.70, 0.78, 0.82, 0.84};
inline const std::vector<std::int64_t> kDefaultReuseLevels = {1, 10, 100};

struct RegimeRow {
  double f1_lo = 0.0;
  double f1_hi = 0.0;
  /// The last range includes its upper bound; all others are [lo, hi).
  bool hi_inclusive = false;
  std::string regime;
  ReuseLevel reuse{1};
  /// Cheapest candidate with F1 in range; nullopt when unreachable.
  std::optional<OperatingPoint> dominant;

  bool in_range(double f1) const { return f1 >= f1_lo && (hi_inclusive ? f1 <= f1_hi : f1 < f1_hi); }
};

struct RegimeTable {
  std::vector<RegimeRow> rows;
};

/// For every F1 range and reuse level, the minimum-effective-token candidate
/// whose F1 falls in the range. `candidates` may mix reuse levels; only points
/// at the row's level compete. Throws ConfigError unless `f1_breaks` has at
/// least two strictly increasing values.
RegimeTable regime_table(std::span<const OperatingPoint> candidates,
                         std::span<const ReuseLevel> reuse_levels,
                         std::span<const double> f1_breaks = kDefaultF1Breaks);

/// (a - b) / a over effective tokens.
double reduction_report(const OperatingPoint& a, const OperatingPoint& b);

/// Cheapest candidate reaching at least `f1_target`.
std::optional<OperatingPoint> min_cost_for_target(std::span<const OperatingPoint> points,
                                                  double f1_target);

struct TargetReduction {
  double f1_target = 0.0;
  OperatingPoint from;
  OperatingPoint to;
  double reduction = 0.0;
};

/// For every distinct candidate F1 reachable at both levels: the cheapest way
/// to reach it at `from` versus at `to`.
std::vector<TargetReduction> target_reductions(std::span<const OperatingPoint> from,
                                               std::span<const OperatingPoint> to);

}  // namespace effront
