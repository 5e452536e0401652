#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "effront/cost_model.hpp"
#include "effront/dataset.hpp"
#include "effront/errors.hpp"
#include "effront/harness.hpp"
#include "effront/metrics.hpp"
#include "effront/report.hpp"

namespace py = pybind11;
using namespace effront;

namespace {

// Records cross the boundary as plain dicts, via their JSON form.
nlohmann::json to_json(const py::handle& obj) {
  const auto json = py::module_::import("json");
  return nlohmann::json::parse(json.attr("dumps")(obj).cast<std::string>());
}

py::object to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<EvaluationRecord> records_from(const py::list& items) {
  std::vector<EvaluationRecord> out;
  for (const auto& item : items) out.push_back(record_from_json(to_json(item)));
  return out;
}

OperatingPoint bare_point(double f1, double tokens) {
  OperatingPoint p;
  p.f1 = f1;
  p.effective_tokens = tokens;
  p.log_cost = log_cost(tokens);
  return p;
}

py::dict analyze_records(const py::list& records, const std::vector<std::int64_t>& reuse_levels,
                         const std::vector<double>& f1_breaks, const std::vector<std::string>& exclude) {
  FrontierOptions options;
  options.reuse_levels = reuse_levels;
  options.f1_breaks = f1_breaks;
  for (const auto& tag : exclude) {
    const auto kind = parse_strategy(tag);
    if (!kind) throw ConfigError("unknown strategy '" + tag + "'");
    options.exclude.push_back(*kind);
  }
  const auto analysis = analyze(records_from(records), options);
  return to_python(frontier_to_json(analysis, options));
}

py::list evaluate(const std::string& dataset, std::size_t sample, std::int64_t seed, const std::string& strategies,
                  const std::string& backend, const std::string& tokenizer) {
  const auto specs = parse_strategy_list(strategies);
  const auto loaded = load_dataset(dataset);
  if (sample == 0 || sample > loaded.instances.size()) throw ConfigError("sample size out of range");
  const auto instances = sample_instances(loaded.instances, sample, seed);
  const auto model = make_backend(backend);
  RunOptions options;
  options.seed = seed;
  py::list out;
  for (const auto& spec : specs) {
    StrategyRun run;
    {
      py::gil_scoped_release release;
      run = run_strategy(instances, spec, *model, tokenizer_for(tokenizer), options);
    }
    out.append(to_python(record_to_json(run.record)));
  }
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full{"effront"};
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cost-aware efficiency frontiers for context strategies.";
  m.attr("__version__") = EFFRONT_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);

  m.def(
      "effective_tokens",
      [](double stage1, double stage2, std::int64_t reuse) { return effective_tokens(stage1, stage2, ReuseLevel(reuse)); },
      py::arg("stage1_tokens"), py::arg("stage2_tokens"), py::arg("reuse") = 1);
  m.def(
      "efficiency_score", [](double f1, double tokens, double w) { return efficiency_score(f1, log_cost(tokens), w); },
      py::arg("f1"), py::arg("tokens"), py::arg("w"));
  m.def(
      "crossover_weight",
      [](double f1_a, double tokens_a, double f1_b, double tokens_b) {
        return crossover_weight(bare_point(f1_a, tokens_a), bare_point(f1_b, tokens_b));
      },
      py::arg("f1_a"), py::arg("tokens_a"), py::arg("f1_b"), py::arg("tokens_b"));
  m.def(
      "reduction", [](double from, double to) { return reduction_report(bare_point(0, from), bare_point(0, to)); },
      py::arg("from_tokens"), py::arg("to_tokens"));
  m.def(
      "answer_f1",
      [](const std::string& prediction, const std::string& gold) {
        const auto s = answer_f1(prediction, gold);
        return py::make_tuple(s.f1, s.em);
      },
      py::arg("prediction"), py::arg("gold"));
  m.def("normalize_answer", &normalize_answer, py::arg("text"));
  m.def(
      "parse_strategy_list",
      [](const std::string& text) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& s : parse_strategy_list(text)) out.emplace_back(to_string(s.kind), s.config.canonical_id());
        return out;
      },
      py::arg("text"));
  m.def("analyze", &analyze_records, py::arg("records"), py::arg("reuse_levels") = kDefaultReuseLevels,
        py::arg("f1_breaks") = kDefaultF1Breaks, py::arg("exclude") = std::vector<std::string>{});
  m.def("evaluate", &evaluate, py::arg("dataset"), py::arg("sample"), py::arg("seed") = 42,
        py::arg("strategies"), py::arg("backend") = "synthetic", py::arg("tokenizer") = std::string(kDefaultTokenizer));
  m.def(
      "synthetic_dataset",
      [](std::size_t count, std::uint64_t seed) { return dataset_to_json(make_synthetic_dataset(count, seed)); },
      py::arg("count"), py::arg("seed") = 42);
  m.def("run_cli", &run_cli, py::arg("args"));
}
