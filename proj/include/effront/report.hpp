#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "effront/domain.hpp"
#include "effront/frontier.hpp"

namespace effront {

struct FrontierOptions {
  std::vector<std::int64_t> reuse_levels = kDefaultReuseLevels;
  std::vector<double> f1_breaks = kDefaultF1Breaks;
  /// Number of evenly spaced w samples in diagnostics.csv; 0 disables it.
  std::size_t diagnostic_grid = 0;
  /// Strategies left out of every stage (e.g. the non-deployable oracle).
  std::vector<StrategyKind> exclude;
};

struct LevelAnalysis {
  ReuseLevel reuse{1};
  std::vector<OperatingPoint> points;
  std::vector<StrategyFrontier> strategies;
  std::vector<FrontierSegment> global;
};

struct FrontierAnalysis {
  std::vector<EvaluationRecord> records;
  std::vector<LevelAnalysis> levels;
  RegimeTable regimes;
  /// Cheapest way to reach each F1 level at the lowest versus the highest reuse level.
  std::vector<TargetReduction> reductions;
};

/// Runs stages 1-3 per reuse level, the regime table and matched-F1 reductions.
/// Throws DataError if a record fails validation or nothing is left after
/// exclusions, ConfigError for bad options.
FrontierAnalysis analyze(std::vector<EvaluationRecord> records, const FrontierOptions& options);

/// "%.6g"
std::string format_real(double v);
/// Percentage with one decimal, e.g. "25.1%".
std::string format_percent(double fraction);

nlohmann::ordered_json frontier_to_json(const FrontierAnalysis& analysis,
                                        const FrontierOptions& options);

inline constexpr const char* kFrontierFile = "frontier.json";
inline constexpr const char* kRegimeFile = "regime.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kSummaryFile = "summary.md";
inline constexpr const char* kDiagnosticsFile = "diagnostics.csv";

struct BundleInput {
  std::string role;
  std::filesystem::path path;
};

/// Writes frontier.json, regime.csv, plotdata_N<n>.csv per level, optional
/// diagnostics.csv and manifest.json into `dir`. The manifest carries the
/// SHA-256 of every input and output file, keyed by file name.
void write_bundle(const FrontierAnalysis& analysis, const FrontierOptions& options,
                  std::span<const BundleInput> inputs, const std::filesystem::path& dir);

/// Checks every manifest hash, then renders the markdown summary from
/// frontier.json and writes it to summary.md. Throws DataError for missing
/// members or hash mismatches.
std::string render_report(const std::filesystem::path& dir);

}  // namespace effront
