#include "effront/frontier.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "effront/cost_model.hpp"
#include "effront/errors.hpp"

namespace effront {

namespace {

double slope(const OperatingPoint& p) { return p.f1 + p.log_cost; }

bool dominates(const OperatingPoint& a, const OperatingPoint& b) {
  return a.f1 >= b.f1 && a.effective_tokens <= b.effective_tokens &&
         (a.f1 > b.f1 || a.effective_tokens < b.effective_tokens);
}

bool same_position(const OperatingPoint& a, const OperatingPoint& b) {
  return a.f1 == b.f1 && a.effective_tokens == b.effective_tokens;
}

// Cheapest first; among equal cost the best F1; then identity.
bool cost_order(const OperatingPoint& a, const OperatingPoint& b) {
  if (a.effective_tokens != b.effective_tokens) return a.effective_tokens < b.effective_tokens;
  if (a.f1 != b.f1) return a.f1 > b.f1;
  return compare_identity(a, b) < 0;
}

std::vector<FrontierSegment> to_segments(std::span<const OperatingPoint> points,
                                         const std::vector<EnvelopePiece>& pieces,
                                         std::span<const OperatingPoint> annotate_from) {
  std::vector<FrontierSegment> out;
  for (const auto& piece : pieces) {
    FrontierSegment seg{piece.w_lo, piece.w_hi, points[piece.winner], {}};
    for (const auto& p : annotate_from) {
      if (same_position(p, seg.winner) && compare_identity(p, seg.winner) != 0) {
        seg.co_optimal.push_back(p);
      }
    }
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace

int compare_identity(const OperatingPoint& a, const OperatingPoint& b) {
  if (const auto c = to_string(a.strategy).compare(to_string(b.strategy)); c != 0) {
    return c < 0 ? -1 : 1;
  }
  if (const auto c = a.config.canonical_id().compare(b.config.canonical_id()); c != 0) {
    return c < 0 ? -1 : 1;
  }
  if (a.record_index != b.record_index) return a.record_index < b.record_index ? -1 : 1;
  return 0;
}

bool preferred_at(const OperatingPoint& a, const OperatingPoint& b, double w) {
  const double sa = efficiency_score(a.f1, a.log_cost, w);
  const double sb = efficiency_score(b.f1, b.log_cost, w);
  if (sa != sb) return sa > sb;
  if (a.effective_tokens != b.effective_tokens) return a.effective_tokens < b.effective_tokens;
  if (a.f1 != b.f1) return a.f1 > b.f1;
  return compare_identity(a, b) < 0;
}

std::size_t best_at(std::span<const OperatingPoint> points, double w) {
  if (points.empty()) throw std::invalid_argument("no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (preferred_at(points[i], points[best], w)) best = i;
  }
  return best;
}

std::vector<OperatingPoint> pareto_filter(std::span<const OperatingPoint> points) {
  std::vector<OperatingPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), cost_order);
  std::vector<OperatingPoint> out;
  for (auto& p : sorted) {
    // Everything already kept is no more expensive, so p survives only by
    // strictly beating the best F1 seen so far.
    if (out.empty() || p.f1 > out.back().f1) out.push_back(std::move(p));
  }
  return out;
}

std::vector<EnvelopePiece> upper_envelope(std::span<const OperatingPoint> points) {
  std::vector<EnvelopePiece> pieces;
  if (points.empty()) return pieces;
  std::size_t current = best_at(points, 0.0);
  double w_lo = 0.0;
  for (;;) {
    const auto& c = points[current];
    std::size_t next = points.size();
    double next_w = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points.size(); ++j) {
      const auto& p = points[j];
      if (j == current || !(slope(p) > slope(c))) continue;
      auto x = crossover_weight_unbounded(c.f1, c.log_cost, p.f1, p.log_cost);
      // Crossing at w = 1 goes to the cheaper current winner.
      if (!x || *x >= 1.0) continue;
      const double w = std::max(*x, w_lo);
      const bool better =
          next == points.size() || w < next_w ||
          (w == next_w && (slope(p) > slope(points[next]) ||
                           (slope(p) == slope(points[next]) && preferred_at(p, points[next], w))));
      if (better) {
        next = j;
        next_w = w;
      }
    }
    if (next == points.size()) {
      pieces.push_back({w_lo, 1.0, current});
      return pieces;
    }
    if (next_w > w_lo) {
      pieces.push_back({w_lo, next_w, current});
      w_lo = next_w;
    }
    current = next;
  }
}

const OperatingPoint& winner_at(std::span<const FrontierSegment> segments, double w) {
  for (const auto& seg : segments) {
    if (w <= seg.w_hi) return seg.winner;
  }
  if (segments.empty()) throw std::invalid_argument("no segments");
  return segments.back().winner;
}

std::string_view to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::ParetoDominated:
      return "pareto-dominated";
    case ExclusionReason::Duplicate:
      return "duplicate";
    case ExclusionReason::BelowEnvelope:
      return "below-envelope";
    case ExclusionReason::TieLoser:
      return "tie-loser";
  }
  return "unknown";
}

StrategyFrontier stage1_optimize(std::span<const OperatingPoint> points) {
  if (points.empty()) throw std::invalid_argument("stage 1 needs at least one configuration");
  StrategyFrontier out;
  out.strategy = points.front().strategy;
  out.reuse = points.front().reuse;

  const auto pieces = upper_envelope(points);
  std::vector<bool> winning(points.size(), false);
  for (const auto& piece : pieces) winning[piece.winner] = true;
  out.segments = to_segments(points, pieces, points);

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (winning[i]) {
      out.retained.push_back(points[i]);
      continue;
    }
    const auto& p = points[i];
    Exclusion ex{p, ExclusionReason::BelowEnvelope, {}};

    // Prefer a retained witness for dominance and duplicates.
    const OperatingPoint* dominator = nullptr;
    const OperatingPoint* twin = nullptr;
    bool dominator_retained = false;
    bool twin_retained = false;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j == i) continue;
      const auto& q = points[j];
      if (dominates(q, p) && (dominator == nullptr || (winning[j] && !dominator_retained))) {
        dominator = &q;
        dominator_retained = winning[j];
      }
      if (same_position(q, p) && compare_identity(q, p) < 0 &&
          (twin == nullptr || (winning[j] && !twin_retained))) {
        twin = &q;
        twin_retained = winning[j];
      }
    }
    if (dominator != nullptr) {
      ex.reason = ExclusionReason::ParetoDominated;
      ex.witnesses.push_back(*dominator);
    } else if (twin != nullptr) {
      ex.reason = ExclusionReason::Duplicate;
      ex.witnesses.push_back(*twin);
    } else {
      // The gap to a convex piecewise-linear envelope peaks at a breakpoint.
      double best_gap = -std::numeric_limits<double>::infinity();
      std::size_t best_break = pieces.size();
      for (std::size_t b = 0; b + 1 < pieces.size(); ++b) {
        const double w = pieces[b].w_hi;
        const auto& left = points[pieces[b].winner];
        const double gap = efficiency_score(p.f1, p.log_cost, w) -
                           efficiency_score(left.f1, left.log_cost, w);
        if (gap > best_gap) {
          best_gap = gap;
          best_break = b;
        }
      }
      if (best_break < pieces.size() && best_gap < 0.0) {
        ex.witnesses.push_back(points[pieces[best_break].winner]);
        ex.witnesses.push_back(points[pieces[best_break + 1].winner]);
      } else {
        ex.reason = ExclusionReason::TieLoser;
        const double w = best_break < pieces.size() ? pieces[best_break].w_hi : 1.0;
        ex.witnesses.push_back(points[best_at(points, w)]);
      }
    }
    out.excluded.push_back(std::move(ex));
  }
  std::sort(out.retained.begin(), out.retained.end(), cost_order);
  return out;
}

std::vector<OperatingPoint> stage2_score(std::span<const EvaluationRecord> records, ReuseLevel reuse) {
  std::vector<OperatingPoint> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out.push_back(project(records[i], i, reuse));
  return out;
}

std::vector<FrontierSegment> global_frontier(std::span<const OperatingPoint> points) {
  return to_segments(points, upper_envelope(points), points);
}

std::vector<FrontierSegment> stage3_global(std::span<const StrategyFrontier> frontiers) {
  std::vector<OperatingPoint> pool;
  for (const auto& f : frontiers) pool.insert(pool.end(), f.retained.begin(), f.retained.end());
  if (pool.empty()) throw std::invalid_argument("stage 3 needs at least one candidate");
  return global_frontier(pool);
}

double winning_measure(std::span<const FrontierSegment> segments, StrategyKind strategy) {
  double total = 0.0;
  for (const auto& seg : segments) {
    if (seg.winner.strategy == strategy) total += seg.w_hi - seg.w_lo;
  }
  return total;
}

RegimeTable regime_table(std::span<const OperatingPoint> candidates,
                         std::span<const ReuseLevel> reuse_levels,
                         std::span<const double> f1_breaks) {
  if (f1_breaks.size() < 2) throw ConfigError("need at least two F1 breaks");
  for (std::size_t i = 1; i < f1_breaks.size(); ++i) {
    if (!(f1_breaks[i] > f1_breaks[i - 1])) {
      throw ConfigError("F1 breaks must be strictly increasing");
    }
  }
  static const char* kNames[] = {"efficiency-oriented", "balanced", "high-performance"};
  const std::size_t ranges = f1_breaks.size() - 1;

  RegimeTable table;
  for (std::size_t r = 0; r < ranges; ++r) {
    for (const auto& level : reuse_levels) {
      RegimeRow row;
      row.f1_lo = f1_breaks[r];
      row.f1_hi = f1_breaks[r + 1];
      row.hi_inclusive = r + 1 == ranges;
      row.regime = ranges == 3 ? kNames[r] : "range-" + std::to_string(r + 1);
      row.reuse = level;
      for (const auto& c : candidates) {
        if (c.reuse != level || !row.in_range(c.f1)) continue;
        if (!row.dominant || cost_order(c, *row.dominant)) row.dominant = c;
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

double reduction_report(const OperatingPoint& a, const OperatingPoint& b) {
  if (!(a.effective_tokens > 0.0)) throw std::invalid_argument("baseline tokens must be positive");
  return (a.effective_tokens - b.effective_tokens) / a.effective_tokens;
}

std::optional<OperatingPoint> min_cost_for_target(std::span<const OperatingPoint> points,
                                                  double f1_target) {
  std::optional<OperatingPoint> best;
  for (const auto& p : points) {
    if (p.f1 < f1_target) continue;
    if (!best || cost_order(p, *best)) best = p;
  }
  return best;
}

std::vector<TargetReduction> target_reductions(std::span<const OperatingPoint> from,
                                               std::span<const OperatingPoint> to) {
  std::vector<double> targets;
  for (const auto& p : from) targets.push_back(p.f1);
  for (const auto& p : to) targets.push_back(p.f1);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::vector<TargetReduction> out;
  for (double t : targets) {
    auto a = min_cost_for_target(from, t);
    auto b = min_cost_for_target(to, t);
    if (!a || !b) continue;
    out.push_back({t, *a, *b, reduction_report(*a, *b)});
  }
  return out;
}

}  // namespace effront
