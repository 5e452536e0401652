#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "effront/backend.hpp"
#include "effront/dataset.hpp"
#include "effront/errors.hpp"
#include "effront/harness.hpp"
#include "effront/hashing.hpp"
#include "effront/prompt.hpp"
#include "effront/report.hpp"

namespace effront::cli {

namespace {

namespace fs = std::filesystem;

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream one(item);
    T value{};
    if (!(one >> value) || !(one >> std::ws).eof()) {
      throw ConfigError(std::string("invalid ") + what + " '" + item + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

struct EvaluateArgs {
  std::string dataset;
  std::size_t sample = 0;
  std::int64_t seed = 42;
  std::vector<std::string> strategies;
  std::string backend = "synthetic";
  std::string tokenizer{kDefaultTokenizer};
  std::size_t workers = 0;
  int retries = 4;
  std::string output = "records.jsonl";
  std::string audit;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  if (args.sample == 0) throw ConfigError("--sample must be positive");
  std::vector<StrategySpec> specs;
  for (const auto& s : args.strategies) {
    auto parsed = parse_strategy_list(s);
    specs.insert(specs.end(), parsed.begin(), parsed.end());
  }
  std::set<std::string> seen;
  for (const auto& s : specs) {
    const auto key = std::string(to_string(s.kind)) + "/" + s.config.canonical_id();
    if (!seen.insert(key).second) throw ConfigError("duplicate strategy configuration " + key);
  }
  const auto& tokenizer = tokenizer_for(args.tokenizer);
  auto backend = make_backend(args.backend);

  RunOptions options;
  options.seed = args.seed;
  options.retry.max_attempts = std::max(1, args.retries);
  options.workers = args.workers;
  if (options.workers == 0) {
    const char* env = std::getenv(kWorkersEnv);
    options.workers = env != nullptr ? std::strtoul(env, nullptr, 10) : 1;
    if (options.workers == 0) options.workers = 1;
  }

  auto loaded = load_dataset(args.dataset);
  const auto sample = sample_instances(loaded.instances, args.sample, args.seed);
  if (loaded.dropped > 0) {
    std::cerr << "dropped " << loaded.dropped << " invalid instances\n";
  }

  std::ostringstream records_text;
  std::ostringstream audit_text;
  nlohmann::ordered_json strategy_keys = nlohmann::ordered_json::array();
  for (const auto& spec : specs) {
    const auto run = run_strategy(sample, spec, *backend, tokenizer, options);
    write_records_jsonl(records_text, std::span(&run.record, 1));
    write_audit_jsonl(audit_text, run);
    strategy_keys.push_back(std::string(to_string(spec.kind)) + "/" + spec.config.canonical_id());
    out << run.record.key() << " f1=" << format_real(run.record.f1)
        << " stage1=" << format_real(run.record.stage1_tokens)
        << " stage2=" << format_real(run.record.stage2_tokens) << "\n";
  }

  const fs::path output(args.output);
  const fs::path audit = args.audit.empty() ? fs::path(args.output + ".audit.jsonl") : fs::path(args.audit);
  write_file(output, records_text.str());
  write_file(audit, audit_text.str());

  nlohmann::ordered_json config;
  config["sample"] = args.sample;
  config["seed"] = args.seed;
  config["strategies"] = strategy_keys;
  config["backend"] = backend->identity();
  config["tokenizer"] = args.tokenizer;
  config["prompt"] = answer_template().hash();
  nlohmann::ordered_json manifest;
  manifest["tool"] = "effront";
  manifest["version"] = EFFRONT_VERSION;
  manifest["config"] = config;
  manifest["config_hash"] = sha256_hex(config.dump());
  manifest["inputs"]["dataset"] = {{"file", fs::path(args.dataset).filename().string()},
                                   {"sha256", sha256_file(args.dataset)},
                                   {"dropped_instances", loaded.dropped}};
  manifest["outputs"][output.filename().string()] = sha256_hex(records_text.str());
  manifest["outputs"][audit.filename().string()] = sha256_hex(audit_text.str());
  write_file(args.output + ".manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

struct FrontierArgs {
  std::string records;
  std::string reuse = "1,10,100";
  std::string f1_breaks = "0.70,0.78,0.82,0.84";
  std::size_t w_grid = 0;
  std::vector<std::string> exclude;
  std::string out = "bundle";
};

int cmd_frontier(const FrontierArgs& args, std::ostream& out) {
  FrontierOptions options;
  options.reuse_levels = parse_list<std::int64_t>(args.reuse, "reuse level");
  options.f1_breaks = parse_list<double>(args.f1_breaks, "F1 break");
  options.diagnostic_grid = args.w_grid;
  for (const auto& tag : args.exclude) {
    auto kind = parse_strategy(tag);
    if (!kind) throw ConfigError("unknown strategy '" + tag + "' in --exclude");
    options.exclude.push_back(*kind);
  }

  const auto lines = read_records_file(args.records);
  std::vector<std::string> problems;
  std::vector<EvaluationRecord> records;
  for (const auto& line : lines) {
    for (const auto& v : validate_record(line.record).violations) {
      problems.push_back("line " + std::to_string(line.line_number) + ": " + v);
    }
    records.push_back(line.record);
  }
  if (!problems.empty()) {
    std::string msg = "invalid records in '" + args.records + "':";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }

  const auto analysis = analyze(std::move(records), options);
  const BundleInput inputs[] = {{"records", args.records}};
  write_bundle(analysis, options, inputs, args.out);
  for (const auto& level : analysis.levels) {
    out << "N=" << level.reuse.n() << ":";
    for (const auto& seg : level.global) {
      out << " [" << format_real(seg.w_lo) << "," << format_real(seg.w_hi) << "] "
          << seg.winner.label() << ";";
    }
    out << "\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& records, const std::string& dataset, std::ostream& out) {
  std::size_t problems = 0;
  if (!records.empty()) {
    for (const auto& line : read_records_file(records)) {
      for (const auto& v : validate_record(line.record).violations) {
        out << records << ":" << line.line_number << ": " << v << "\n";
        ++problems;
      }
    }
  }
  if (!dataset.empty()) {
    const auto loaded = load_dataset(dataset);
    out << dataset << ": " << loaded.instances.size() << " instances, " << loaded.dropped
        << " dropped\n";
  }
  if (problems > 0) throw DataError(std::to_string(problems) + " invalid record field(s)");
  out << "ok\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Efficiency frontier analysis for LLM context-management strategies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EFFRONT_VERSION);

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate strategies on a QA dataset into a records file");
  evaluate->add_option("--dataset", eval.dataset, "HotpotQA distractor-format JSON")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--sample", eval.sample, "Number of instances to sample")->required();
  evaluate->add_option("--seed", eval.seed, "Sampling and backend seed")->capture_default_str();
  evaluate->add_option("--strategies", eval.strategies, strategy_grammar_help())->required();
  evaluate->add_option("--backend", eval.backend,
                       "synthetic | synthetic:noise=P | http (reads EFFRONT_BACKEND_URL, "
                       "EFFRONT_API_KEY, EFFRONT_MODEL)")
      ->capture_default_str();
  evaluate->add_option("--tokenizer", eval.tokenizer, "whitespace | wordpunct")->capture_default_str();
  evaluate->add_option("--workers", eval.workers, "Worker threads (default: EFFRONT_WORKERS or 1)");
  evaluate->add_option("--retries", eval.retries, "Attempts per backend call")->capture_default_str();
  evaluate->add_option("--output", eval.output, "Records file (JSON lines)")->capture_default_str();
  evaluate->add_option("--audit", eval.audit, "Per-instance audit log (default: <output>.audit.jsonl)");

  FrontierArgs front;
  auto* frontier = app.add_subcommand("frontier", "Compute frontiers, regime table and reductions");
  frontier->add_option("--records", front.records, "Records file")->required();
  frontier->add_option("--reuse", front.reuse, "Comma-separated reuse levels N")->capture_default_str();
  frontier->add_option("--f1-breaks", front.f1_breaks, "Strictly increasing F1 range bounds")
      ->capture_default_str();
  frontier->add_option("--w-grid", front.w_grid, "Emit diagnostics.csv with this many w samples");
  frontier->add_option("--exclude", front.exclude, "Strategy tags to leave out");
  frontier->add_option("--out", front.out, "Bundle directory")->capture_default_str();

  std::string bundle;
  auto* report = app.add_subcommand("report", "Verify a bundle and render its markdown summary");
  report->add_option("--bundle", bundle, "Bundle directory")->required();

  std::string validate_records;
  std::string validate_dataset;
  auto* validate = app.add_subcommand("validate", "Check a records file and/or dataset");
  validate->add_option("--records", validate_records, "Records file");
  validate->add_option("--dataset", validate_dataset, "Dataset file");

  std::size_t synth_count = 200;
  std::uint64_t synth_seed = 42;
  std::string synth_output = "synthetic.json";
  auto* synthesize = app.add_subcommand("synthesize", "Write a synthetic HotpotQA-format dataset");
  synthesize->add_option("--count", synth_count, "Number of instances")->capture_default_str();
  synthesize->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synthesize->add_option("--output", synth_output, "Output JSON path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << EFFRONT_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::Success&) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*evaluate) return cmd_evaluate(eval, out);
    if (*frontier) return cmd_frontier(front, out);
    if (*report) {
      out << render_report(bundle);
      return kExitOk;
    }
    if (*validate) {
      if (validate_records.empty() && validate_dataset.empty()) {
        throw ConfigError("validate needs --records and/or --dataset");
      }
      return cmd_validate(validate_records, validate_dataset, out);
    }
    if (*synthesize) {
      const auto data = make_synthetic_dataset(synth_count, synth_seed);
      write_file(synth_output, dataset_to_json(data) + "\n");
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace effront::cli
