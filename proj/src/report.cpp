#include "effront/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "effront/errors.hpp"
#include "effront/hashing.hpp"

namespace effront {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_percent(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

FrontierAnalysis analyze(std::vector<EvaluationRecord> records, const FrontierOptions& options) {
  if (options.reuse_levels.empty()) throw ConfigError("at least one reuse level is required");
  std::vector<ReuseLevel> levels;
  for (auto n : options.reuse_levels) {
    if (n < 1) throw ConfigError("reuse levels must be >= 1");
    levels.emplace_back(n);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto v = validate_record(records[i]);
    if (!v.ok()) {
      throw DataError("record " + std::to_string(i + 1) + " (" + records[i].key() +
                      "): " + v.violations.front());
    }
  }
  std::erase_if(records, [&](const EvaluationRecord& r) {
    return std::find(options.exclude.begin(), options.exclude.end(), r.strategy) !=
           options.exclude.end();
  });
  if (records.empty()) throw DataError("no records to analyze");

  FrontierAnalysis out;
  out.records = std::move(records);
  std::vector<OperatingPoint> all_points;
  for (const auto& level : levels) {
    LevelAnalysis la;
    la.reuse = level;
    la.points = stage2_score(out.records, level);
    for (auto kind : kAllStrategies) {
      std::vector<OperatingPoint> mine;
      for (const auto& p : la.points) {
        if (p.strategy == kind) mine.push_back(p);
      }
      if (!mine.empty()) la.strategies.push_back(stage1_optimize(mine));
    }
    la.global = stage3_global(la.strategies);
    all_points.insert(all_points.end(), la.points.begin(), la.points.end());
    out.levels.push_back(std::move(la));
  }
  out.regimes = regime_table(all_points, levels, options.f1_breaks);
  if (out.levels.size() > 1) {
    out.reductions = target_reductions(out.levels.front().points, out.levels.back().points);
  }
  return out;
}

namespace {

ojson point_json(const OperatingPoint& p) {
  ojson j;
  j["strategy"] = std::string(to_string(p.strategy));
  j["config"] = p.config.canonical_id();
  j["label"] = p.label();
  j["record_index"] = p.record_index;
  j["reuse"] = p.reuse.n();
  j["f1"] = p.f1;
  j["effective_tokens"] = p.effective_tokens;
  j["log_cost"] = p.log_cost;
  return j;
}

ojson segments_json(std::span<const FrontierSegment> segments) {
  ojson arr = ojson::array();
  for (const auto& s : segments) {
    ojson j;
    j["w_lo"] = s.w_lo;
    j["w_hi"] = s.w_hi;
    j["winner"] = point_json(s.winner);
    ojson co = ojson::array();
    for (const auto& p : s.co_optimal) co.push_back(point_json(p));
    j["co_optimal"] = std::move(co);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing bundle member '" + path.filename().string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string regime_csv(const RegimeTable& table) {
  std::string out = "regime,f1_lo,f1_hi,reuse,strategy,config,label,f1,effective_tokens\n";
  for (const auto& row : table.rows) {
    out += row.regime + "," + format_real(row.f1_lo) + "," + format_real(row.f1_hi) + "," +
           std::to_string(row.reuse.n()) + ",";
    if (row.dominant) {
      const auto& p = *row.dominant;
      out += std::string(to_string(p.strategy)) + "," + csv_field(p.config.canonical_id()) + "," +
             csv_field(p.label()) + "," + format_real(p.f1) + "," +
             format_real(p.effective_tokens) + "\n";
    } else {
      out += "unreachable,,,,\n";
    }
  }
  return out;
}

std::string interval(const std::vector<FrontierSegment>& segments, const OperatingPoint& p,
                     bool upper) {
  for (const auto& s : segments) {
    if (s.winner.record_index == p.record_index) return format_real(upper ? s.w_hi : s.w_lo);
  }
  return "";
}

std::string plotdata_csv(const LevelAnalysis& level) {
  std::string out =
      "strategy,config,label,f1,effective_tokens,log_cost,pareto,retained,"
      "strategy_w_lo,strategy_w_hi,global_w_lo,global_w_hi\n";
  for (const auto& sf : level.strategies) {
    std::vector<OperatingPoint> mine;
    for (const auto& p : level.points) {
      if (p.strategy == sf.strategy) mine.push_back(p);
    }
    const auto pareto = pareto_filter(mine);
    for (const auto& p : mine) {
      const bool on_pareto = std::any_of(pareto.begin(), pareto.end(), [&](const OperatingPoint& q) {
        return q.record_index == p.record_index;
      });
      const bool retained = std::any_of(sf.retained.begin(), sf.retained.end(),
                                        [&](const OperatingPoint& q) {
                                          return q.record_index == p.record_index;
                                        });
      out += std::string(to_string(p.strategy)) + "," + csv_field(p.config.canonical_id()) + "," +
             csv_field(p.label()) + "," + format_real(p.f1) + "," +
             format_real(p.effective_tokens) + "," + format_real(p.log_cost) + "," +
             (on_pareto ? "1" : "0") + "," + (retained ? "1" : "0") + "," +
             interval(sf.segments, p, false) + "," + interval(sf.segments, p, true) + "," +
             interval(level.global, p, false) + "," + interval(level.global, p, true) + "\n";
    }
  }
  return out;
}

std::string diagnostics_csv(const FrontierAnalysis& analysis, std::size_t samples) {
  std::string out = "w";
  for (const auto& level : analysis.levels) out += ",winner_N" + std::to_string(level.reuse.n());
  out += "\n";
  for (std::size_t i = 0; i < samples; ++i) {
    const double w = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
    out += format_real(w);
    for (const auto& level : analysis.levels) out += "," + csv_field(winner_at(level.global, w).label());
    out += "\n";
  }
  return out;
}

ojson options_json(const FrontierOptions& options) {
  ojson j;
  j["reuse_levels"] = options.reuse_levels;
  j["f1_breaks"] = options.f1_breaks;
  j["diagnostic_grid"] = options.diagnostic_grid;
  ojson ex = ojson::array();
  for (auto k : options.exclude) ex.push_back(std::string(to_string(k)));
  j["exclude"] = std::move(ex);
  return j;
}

}  // namespace

ojson frontier_to_json(const FrontierAnalysis& analysis, const FrontierOptions& options) {
  ojson root;
  root["options"] = options_json(options);
  ojson levels = ojson::array();
  for (const auto& level : analysis.levels) {
    ojson lj;
    lj["reuse"] = level.reuse.n();
    lj["segments"] = segments_json(level.global);
    ojson strategies = ojson::array();
    for (const auto& sf : level.strategies) {
      ojson sj;
      sj["strategy"] = std::string(to_string(sf.strategy));
      ojson retained = ojson::array();
      for (const auto& p : sf.retained) retained.push_back(point_json(p));
      sj["retained"] = std::move(retained);
      sj["segments"] = segments_json(sf.segments);
      ojson excluded = ojson::array();
      for (const auto& ex : sf.excluded) {
        ojson ej;
        ej["point"] = point_json(ex.point);
        ej["reason"] = std::string(to_string(ex.reason));
        ojson witnesses = ojson::array();
        for (const auto& w : ex.witnesses) witnesses.push_back(point_json(w));
        ej["witnesses"] = std::move(witnesses);
        excluded.push_back(std::move(ej));
      }
      sj["excluded"] = std::move(excluded);
      strategies.push_back(std::move(sj));
    }
    lj["strategies"] = std::move(strategies);
    levels.push_back(std::move(lj));
  }
  root["levels"] = std::move(levels);

  ojson rows = ojson::array();
  for (const auto& row : analysis.regimes.rows) {
    ojson rj;
    rj["regime"] = row.regime;
    rj["f1_lo"] = row.f1_lo;
    rj["f1_hi"] = row.f1_hi;
    rj["hi_inclusive"] = row.hi_inclusive;
    rj["reuse"] = row.reuse.n();
    rj["dominant"] = row.dominant ? point_json(*row.dominant) : ojson(nullptr);
    rows.push_back(std::move(rj));
  }
  root["regime_table"] = std::move(rows);

  ojson reductions = ojson::array();
  for (const auto& r : analysis.reductions) {
    ojson rj;
    rj["f1_target"] = r.f1_target;
    rj["from"] = point_json(r.from);
    rj["to"] = point_json(r.to);
    rj["reduction"] = r.reduction;
    reductions.push_back(std::move(rj));
  }
  root["reductions"] = std::move(reductions);
  return root;
}

void write_bundle(const FrontierAnalysis& analysis, const FrontierOptions& options,
                  std::span<const BundleInput> inputs, const fs::path& dir) {
  fs::create_directories(dir);
  std::map<std::string, std::string> outputs;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    outputs[name] = sha256_hex(text);
  };
  emit(kFrontierFile, frontier_to_json(analysis, options).dump(2) + "\n");
  emit(kRegimeFile, regime_csv(analysis.regimes));
  for (const auto& level : analysis.levels) {
    emit("plotdata_N" + std::to_string(level.reuse.n()) + ".csv", plotdata_csv(level));
  }
  if (options.diagnostic_grid > 0) {
    emit(kDiagnosticsFile, diagnostics_csv(analysis, options.diagnostic_grid));
  }

  ojson manifest;
  manifest["tool"] = "effront";
  manifest["version"] = EFFRONT_VERSION;
  manifest["config_hash"] = sha256_hex(options_json(options).dump());
  ojson in = ojson::object();
  for (const auto& input : inputs) {
    in[input.role] = {{"file", input.path.filename().string()},
                      {"sha256", sha256_file(input.path.string())}};
  }
  manifest["inputs"] = std::move(in);
  ojson out = ojson::object();
  for (const auto& [name, hash] : outputs) out[name] = hash;
  manifest["outputs"] = std::move(out);
  write_text(dir / kManifestFile, manifest.dump(2) + "\n");
}

namespace {

std::string point_cell(const ojson& p) {
  return p["label"].get<std::string>() + " @ " + format_real(p["effective_tokens"].get<double>()) +
         " tokens (F1 " + format_real(p["f1"].get<double>()) + ")";
}

}  // namespace

std::string render_report(const fs::path& dir) {
  const auto manifest_text = read_text(dir / kManifestFile);
  ojson manifest;
  try {
    manifest = ojson::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.contains("outputs") || !manifest["outputs"].contains(kFrontierFile)) {
    throw DataError("manifest does not list frontier.json");
  }
  for (const auto& [name, hash] : manifest["outputs"].items()) {
    const auto text = read_text(dir / name);
    if (sha256_hex(text) != hash.get<std::string>()) {
      throw DataError("integrity error: '" + name + "' does not match its manifest hash");
    }
  }
  ojson frontier;
  try {
    frontier = ojson::parse(read_text(dir / kFrontierFile));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed frontier.json: ") + e.what());
  }

  std::ostringstream md;
  md << "# Efficiency frontier summary\n\n";
  for (const auto& [role, input] : manifest["inputs"].items()) {
    md << "- " << role << ": `" << input["file"].get<std::string>() << "` (sha256 "
       << input["sha256"].get<std::string>().substr(0, 12) << ")\n";
  }
  md << "- config hash: " << manifest["config_hash"].get<std::string>().substr(0, 12) << "\n\n";

  md << "## Transition points\n\n";
  for (const auto& level : frontier["levels"]) {
    md << "### N = " << level["reuse"].get<std::int64_t>() << "\n\n";
    md << "| w interval | optimal choice | F1 | effective tokens |\n";
    md << "|---|---|---|---|\n";
    bool first = true;
    for (const auto& seg : level["segments"]) {
      const auto& p = seg["winner"];
      md << "| " << (first ? "[" : "(") << format_real(seg["w_lo"].get<double>()) << ", "
         << format_real(seg["w_hi"].get<double>()) << "] | " << p["label"].get<std::string>();
      for (const auto& co : seg["co_optimal"]) md << " = " << co["label"].get<std::string>();
      md << " | " << format_real(p["f1"].get<double>()) << " | "
         << format_real(p["effective_tokens"].get<double>()) << " |\n";
      first = false;
    }
    const auto& segments = level["segments"];
    if (segments.size() > 1) {
      md << "\nTransitions at w =";
      for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        md << (i == 0 ? " " : ", ") << format_real(segments[i]["w_hi"].get<double>());
      }
      md << "\n";
    }
    md << "\n";
  }

  md << "## Regime table\n\n";
  std::vector<std::int64_t> levels;
  for (const auto& level : frontier["levels"]) levels.push_back(level["reuse"].get<std::int64_t>());
  md << "| regime (F1 range) |";
  for (auto n : levels) md << " N=" << n << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < levels.size(); ++i) md << "---|";
  md << "\n";
  const auto& rows = frontier["regime_table"];
  for (std::size_t i = 0; i < rows.size(); i += levels.size()) {
    const auto& row = rows[i];
    md << "| " << row["regime"].get<std::string>() << " [" << format_real(row["f1_lo"].get<double>())
       << ", " << format_real(row["f1_hi"].get<double>())
       << (row["hi_inclusive"].get<bool>() ? "]" : ")") << " |";
    for (std::size_t j = 0; j < levels.size() && i + j < rows.size(); ++j) {
      const auto& dominant = rows[i + j]["dominant"];
      md << " " << (dominant.is_null() ? std::string("unreachable") : point_cell(dominant)) << " |";
    }
    md << "\n";
  }

  md << "\n## Cost reduction at matched performance\n\n";
  if (frontier["reductions"].empty()) {
    md << "Needs at least two reuse levels.\n";
  }
  for (const auto& r : frontier["reductions"]) {
    const auto& from = r["from"];
    const auto& to = r["to"];
    md << "- F1 >= " << format_real(r["f1_target"].get<double>()) << ": "
       << from["label"].get<std::string>() << " at N=" << from["reuse"].get<std::int64_t>() << " ("
       << format_real(from["effective_tokens"].get<double>()) << " tokens) -> "
       << to["label"].get<std::string>() << " at N=" << to["reuse"].get<std::int64_t>() << " ("
       << format_real(to["effective_tokens"].get<double>()) << " tokens): "
       << format_percent(r["reduction"].get<double>()) << " reduction\n";
  }
  const auto text = md.str();
  write_text(dir / kSummaryFile, text);
  return text;
}

}  // namespace effront
