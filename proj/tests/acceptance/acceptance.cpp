// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "effront/cost_model.hpp"
#include "effront/dataset.hpp"
#include "effront/frontier.hpp"
#include "effront/metrics.hpp"
#include "effront/report.hpp"
#include "effront/retrieval.hpp"
#include "envelope_oracle.hpp"
#include "metric_cases.hpp"
#include "naive_retrieval.hpp"
#include "support.hpp"

namespace {

using namespace effront;
namespace fs = std::filesystem;
using K = StrategyKind;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failed check; later checks still run.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string str(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::vector<OperatingPoint> published_at(std::int64_t n) {
  return stage2_score(testing::published_fixture(), ReuseLevel(n));
}

std::vector<StrategyFrontier> per_strategy(const std::vector<OperatingPoint>& pts) {
  std::map<K, std::vector<OperatingPoint>> groups;
  for (const auto& p : pts) groups[p.strategy].push_back(p);
  std::vector<StrategyFrontier> out;
  for (const auto& [_, g] : groups) out.push_back(stage1_optimize(g));
  return out;
}

Outcome decision_table() {
  Check c;
  std::vector<OperatingPoint> pts = published_at(1);
  const auto high = published_at(100);
  pts.insert(pts.end(), high.begin(), high.end());
  const ReuseLevel levels[] = {ReuseLevel(1), ReuseLevel(100)};
  const auto table = regime_table(pts, levels);
  const std::map<std::pair<std::string, std::int64_t>, K> expected = {
      {{"efficiency-oriented", 1}, K::TfIdfQueryAware},  {{"balanced", 1}, K::TfIdfQueryAware},
      {{"high-performance", 1}, K::FullContext},         {{"efficiency-oriented", 100}, K::MemoryCompression},
      {{"balanced", 100}, K::MemoryCompression},        {{"high-performance", 100}, K::FullContext},
  };
  std::size_t seen = 0;
  for (const auto& row : table.rows) {
    const auto it = expected.find({row.regime, row.reuse.n()});
    if (it == expected.end()) continue;
    ++seen;
    const std::string cell = row.regime + " N=" + std::to_string(row.reuse.n());
    c.expect(row.dominant.has_value(), cell + " unreachable");
    if (row.dominant) {
      c.expect(row.dominant->strategy == it->second, cell + " -> " + row.dominant->label());
    }
    if (row.regime == "balanced" && row.dominant) {
      const double want = row.reuse.n() == 1 ? 566.0 : 424.0;
      c.expect(row.dominant->effective_tokens == want, cell + " costs " + str(row.dominant->effective_tokens));
    }
  }
  c.expect(seen == expected.size(), "regime table has " + std::to_string(seen) + " of 6 cells");
  c.note("N=1: TF-IDF QA / TF-IDF QA / Full-Context; N=100: Mem. Comp. / Mem. Comp. / Full-Context");
  return c.result();
}

Outcome reductions() {
  Check c;
  const auto low = published_at(1);
  const auto high = published_at(100);
  const double r1 = reduction_report(low[1], high[7]);
  const double r2 = reduction_report(low[4], high[8]);
  c.expect(std::abs(r1 * 100 - 25.1) <= 0.1, "566->424 gives " + str(r1 * 100));
  c.expect(std::abs(r2 * 100 - 55.3) <= 0.1, "1308->584 gives " + str(r2 * 100));
  c.note("566->424 " + format_percent(r1) + ", 1308->584 " + format_percent(r2));
  return c.result();
}

Outcome envelope_equivalence() {
  Check c;
  SplitMix64 rng(20250101);
  constexpr std::size_t kGrid = 100001;
  for (int t = 0; t < 10000; ++t) {
    const auto pts = testing::random_candidates(rng, 1 + rng.below(50), t % 4 == 0, t % 2 == 0);
    const testing::GridOracle oracle(pts);
    const auto direct = global_frontier(pts);
    const auto groups = per_strategy(pts);
    const auto staged = stage3_global(groups);
    c.expect(testing::tiles_unit_interval(direct) && testing::tiles_unit_interval(staged),
             "set " + std::to_string(t) + " does not tile [0,1]");
    const auto want = oracle.winners(kGrid);
    for (const auto* segs : {&direct, &staged}) {
      const auto r = testing::sweep(oracle, want, *segs);
      c.expect(r.mismatches + r.rounding_ties == 0,
               "set " + std::to_string(t) + ": " + std::to_string(r.mismatches + r.rounding_ties) + " mismatches");
    }
    for (const auto& g : groups) {
      std::vector<OperatingPoint> members;
      for (const auto& p : pts) {
        if (p.strategy == g.strategy) members.push_back(p);
      }
      const auto r = testing::sweep(testing::GridOracle(members), g.segments, kGrid);
      c.expect(r.mismatches + r.rounding_ties == 0, "stage 1 set " + std::to_string(t) + " mismatches");
    }
  }
  c.note("10000 sets x 100001 grid points, stages 1 and 3 and the direct envelope");
  return c.result();
}

Outcome pareto_equivalence() {
  Check c;
  SplitMix64 rng(77);
  for (int t = 0; t < 1000; ++t) {
    const auto pts = testing::random_candidates(rng, 1 + rng.below(200), t % 3 == 0, true);
    std::vector<std::size_t> got;
    for (const auto& p : pareto_filter(pts)) got.push_back(p.record_index);
    std::sort(got.begin(), got.end());
    c.expect(got == testing::brute_force_pareto(pts), "set " + std::to_string(t));
  }
  c.note("1000 sets, n <= 200");
  return c.result();
}

Outcome cost_properties() {
  Check c;
  SplitMix64 rng(314159);
  constexpr int kN = 10000;
  auto tokens = [&] { return 1.0 + rng.uniform() * 1e5; };
  for (int i = 0; i < kN; ++i) {
    const double s1 = rng.uniform() * 1e6;
    const double s2 = tokens();
    const auto n1 = static_cast<std::int64_t>(1 + rng.below(1000));
    const auto n2 = n1 + static_cast<std::int64_t>(1 + rng.below(1000));
    const double e1 = effective_tokens(s1, s2, ReuseLevel(n1));
    const double e2 = effective_tokens(s1, s2, ReuseLevel(n2));
    c.expect(e1 >= e2 && e2 >= s2, "amortization not monotone");
  }
  for (int i = 0; i < kN; ++i) {
    const double s1 = rng.uniform() * 1e6;
    const double s2 = tokens();
    const double e = effective_tokens(s1, s2, ReuseLevel(1'000'000'000'000));
    c.expect(e >= s2 && e - s2 <= 1e-6 * s2 + 1e-6, "no limit to stage2");
  }
  for (int i = 0; i < kN; ++i) {
    const double w = rng.uniform();
    const double f = rng.uniform();
    const double t = tokens();
    const double df = rng.uniform() * (1 - f);
    const double dt = rng.uniform() * 1e4;
    c.expect(efficiency_score(f + df, log_cost(t), w) >= efficiency_score(f, log_cost(t), w), "F1 monotonicity");
    c.expect(efficiency_score(f, log_cost(t + dt), w) <= efficiency_score(f, log_cost(t), w), "token monotonicity");
  }
  int crossings = 0;
  for (int i = 0; i < kN; ++i) {
    const auto a = testing::point(rng.uniform(), tokens());
    const auto b = testing::point(rng.uniform(), tokens());
    const auto w = crossover_weight(a, b);
    if (!w) continue;
    ++crossings;
    const double sa = efficiency_score(a.f1, a.log_cost, *w);
    const double sb = efficiency_score(b.f1, b.log_cost, *w);
    c.expect(std::abs(sa - sb) <= 1e-12 * std::max({std::abs(sa), std::abs(sb), 1.0}), "crossover inconsistent");
  }
  c.expect(crossings > 1000, "too few crossings");
  c.note("4 x 10000 inputs, " + std::to_string(crossings) + " crossovers checked");
  return c.result();
}

Outcome metrics_hand_check() {
  Check c;
  int n = 0;
  for (const auto& m : testing::kMetricCases) {
    const auto s = answer_f1(m.prediction, m.gold);
    c.expect(s.f1 == m.f1 && s.em == m.em, std::string("\"") + m.prediction + "\" vs \"" + m.gold + "\"");
    ++n;
  }
  c.expect(n == 10, "expected 10 cases");
  c.note(std::to_string(n) + " curated pairs exact");
  return c.result();
}

std::vector<std::string> document_texts(const QaInstance& inst) {
  std::vector<std::string> docs;
  for (const auto& d : inst.documents) {
    std::string text;
    for (const auto& s : d.sentences) text += s + " ";
    docs.push_back(text);
  }
  return docs;
}

Outcome retrieval_correctness() {
  Check c;
  const auto fixture = make_synthetic_dataset(50, 11);
  std::size_t hits = 0, facts = 0;
  for (const auto& inst : fixture) {
    const auto sel = oracle_context(inst);
    for (const auto& f : inst.supporting_facts) {
      ++facts;
      for (auto d : sel) {
        if (inst.documents[d].title == f.title) {
          ++hits;
          break;
        }
      }
    }
  }
  c.expect(hits == facts, "oracle recall " + std::to_string(hits) + "/" + std::to_string(facts));

  std::size_t corpora = 0;
  for (std::uint64_t seed : {7u, 11u, 42u}) {
    for (const auto& inst : make_synthetic_dataset(50, seed)) {
      const auto docs = document_texts(inst);
      const auto model = TfIdfModel::build(docs);
      const auto naive = testing::naive_query_ranking(docs, inst.question);
      for (std::size_t k = 1; k <= docs.size(); ++k) {
        const auto r = rank_query_aware(model, inst.question, k);
        const std::vector<std::size_t> want(naive.order.begin(), naive.order.begin() + k);
        c.expect(r.selected == want, inst.id + " k=" + std::to_string(k));
      }
      ++corpora;
    }
  }

  const std::vector<std::string> docs{"zebra quokka axolotl narwhal", "the weather in oslo", "the weather in rome"};
  const auto model = TfIdfModel::build(docs);
  const auto vanilla = rank_vanilla(model, 3).selected;
  const auto aware = rank_query_aware(model, "weather in rome", 3).selected;
  c.expect(vanilla != aware && aware.front() == 2, "rankings do not differ");
  c.note("recall " + std::to_string(hits) + "/" + std::to_string(facts) + ", " + std::to_string(corpora) +
         " corpora match the full sort");
  return c.result();
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "effront");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << e.str();
  return code;
}

const char* kStrategies =
    "full_context,oracle,tfidf_vanilla:k=2,tfidf_vanilla:k=4,tfidf_vanilla:k=6,tfidf_qa:k=2,tfidf_qa:k=3,"
    "tfidf_qa:k=4,embedding:k=2,embedding:k=4,memory_compression:ratio=1.5,memory_compression:ratio=2,"
    "memory_compression:ratio=4";

// evaluate -> frontier -> report inside `dir`; returns false on a nonzero exit.
bool pipeline(const fs::path& dir) {
  fs::create_directories(dir);
  const auto data = (dir / "hotpot.json").string();
  const auto records = (dir / "records.jsonl").string();
  if (run_cli({"synthesize", "--count", "200", "--seed", "42", "--output", data}) != 0) return false;
  if (run_cli({"evaluate", "--dataset", data, "--sample", "200", "--seed", "42", "--backend", "synthetic",
               "--strategies", kStrategies, "--output", records}) != 0) {
    return false;
  }
  if (run_cli({"frontier", "--records", records, "--exclude", "oracle", "--out", (dir / "bundle").string()}) != 0) {
    return false;
  }
  return run_cli({"report", "--bundle", (dir / "bundle").string()}) == 0;
}

std::vector<EvaluationRecord> load_records(const fs::path& path) {
  std::vector<EvaluationRecord> out;
  for (auto& line : read_records_file(path.string())) out.push_back(std::move(line.record));
  return out;
}

struct EndToEnd {
  testing::TempDir dir;
  bool ok = false;
  EndToEnd() {
    ok = pipeline(dir / "a") && pipeline(dir / "b");
  }
};

EndToEnd& end_to_end() {
  static EndToEnd e;
  return e;
}

Outcome determinism() {
  Check c;
  auto& e = end_to_end();
  c.expect(e.ok, "pipeline exited nonzero");
  if (!e.ok) return c.result();
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(e.dir / "a" / "bundle")) {
    const auto other = e.dir / "b" / "bundle" / entry.path().filename();
    c.expect(testing::read_text(entry.path()) == testing::read_text(other),
             entry.path().filename().string() + " differs");
    ++files;
  }
  c.expect(testing::read_text(e.dir / "a" / "records.jsonl") == testing::read_text(e.dir / "b" / "records.jsonl"),
           "records differ");

  std::map<K, std::map<std::int64_t, double>> by_k;
  for (const auto& r : load_records(e.dir / "a" / "records.jsonl")) {
    if (r.strategy == K::FullContext || r.strategy == K::OracleRetrieval) {
      c.expect(r.f1 == 1.0, std::string(display_name(r.strategy)) + " F1 " + str(r.f1));
    }
    if (auto k = r.config.get_int("k")) by_k[r.strategy][*k] = r.f1;
  }
  for (const auto& [kind, series] : by_k) {
    double prev = 1.0;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
      c.expect(it->second <= prev, std::string(display_name(kind)) + " F1 rises as k decreases");
      prev = it->second;
    }
  }
  c.expect(by_k.size() == 3, "expected three retrieval strategies");
  c.note(std::to_string(files) + " bundle files byte-identical across two runs");
  return c.result();
}

Outcome frontier_shape() {
  Check c;
  auto& e = end_to_end();
  c.expect(e.ok, "pipeline exited nonzero");
  if (!e.ok) return c.result();
  FrontierOptions options;
  options.exclude = {K::OracleRetrieval};
  const auto analysis = analyze(load_records(e.dir / "a" / "records.jsonl"), options);
  double prev = -1.0;
  std::vector<FrontierSegment> prev_segments;
  std::string trace;
  for (const auto& level : analysis.levels) {
    const double m = winning_measure(level.global, K::MemoryCompression);
    c.expect(m >= prev, "measure falls at N=" + std::to_string(level.reuse.n()));
    // Every w won by Mem. Comp. at the lower level is still won by it.
    for (const auto& s : prev_segments) {
      if (s.winner.strategy != K::MemoryCompression) continue;
      for (int i = 0; i <= 1000; ++i) {
        const double w = s.w_lo + (s.w_hi - s.w_lo) * i / 1000.0;
        if (w == s.w_lo && s.w_lo > 0.0) continue;
        c.expect(winner_at(level.global, w).strategy == K::MemoryCompression,
                 "interval not retained at N=" + std::to_string(level.reuse.n()));
      }
    }
    prev = m;
    prev_segments = level.global;
    trace += (trace.empty() ? "" : ", ") + std::string("N=") + std::to_string(level.reuse.n()) + ": " + str(m);
  }
  c.expect(prev > 0.0, "Mem. Comp. never wins");
  c.note("Mem. Comp. measure " + trace);
  return c.result();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria = {
      {"decision table on published operating points", decision_table, 1},
      {"reduction figures", reductions, 1},
      {"envelope oracle equivalence", envelope_equivalence, 60},
      {"pareto oracle equivalence", pareto_equivalence, 10},
      {"cost-model properties", cost_properties, 10},
      {"metrics hand-check", metrics_hand_check, 1},
      {"retrieval correctness", retrieval_correctness, 10},
      {"end-to-end determinism", determinism, 120},
      {"frontier shape under reuse", frontier_shape, 120},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, fn, budget] : criteria) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > budget) o = {false, "over the " + str(budget) + "s budget"};
    std::printf("%s %d %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
