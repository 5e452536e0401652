#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effront/backend.hpp"
#include "effront/domain.hpp"
#include "effront/tokenizer.hpp"

namespace effront {

struct StrategySpec {
  StrategyKind kind = StrategyKind::FullContext;
  ConfigDescriptor config;
};

/// Parses the compact strategy grammar: comma-separated entries of the form
/// `name` or `name:key=value`, where further `key=value` tokens after an entry
/// belong to it, e.g. "tfidf_qa:k=16,unit=sentence,full_context".
///
/// Keys per strategy:
///   tfidf_vanilla, tfidf_qa   k (int, default 16), unit (document|sentence)
///   embedding                 k, unit, embedder (default hash-bow-256)
///   memory_compression        ratio (real > 1, default 2.0), compressor (extractive|llm)
///   full_context, oracle      none
///
/// Defaults are filled in. Unknown strategies, unknown keys and invalid values
/// throw ConfigError.
std::vector<StrategySpec> parse_strategy_list(std::string_view text);

/// The lines of --help text describing the grammar above.
std::string strategy_grammar_help();

struct RunOptions {
  std::int64_t seed = 42;
  std::size_t workers = 1;
  RetryPolicy retry;
};

struct InstanceAudit {
  std::string instance_id;
  std::string answer;
  double prompt_tokens = 0.0;
  double completion_tokens = 0.0;
  double stage1_tokens = 0.0;
  double f1 = 0.0;
  double em = 0.0;
  std::vector<std::size_t> context_documents;
};

struct StrategyRun {
  EvaluationRecord record;
  /// Sorted by instance id.
  std::vector<InstanceAudit> audit;
};

/// The context block a strategy shows the model for one instance, plus the
/// stage-1 cost spent building it.
struct BuiltContext {
  std::string text;
  double stage1_tokens = 0.0;
  std::vector<std::size_t> documents;
};

BuiltContext build_context(const QaInstance& instance, const StrategySpec& spec,
                           AnswerBackend& backend, const Tokenizer& tokenizer,
                           const RetryPolicy& retry);

/// Evaluates one strategy configuration over the instances. Per-instance work
/// runs on up to `options.workers` threads; aggregation folds in instance-id
/// order, so the record does not depend on the worker count. Any instance
/// failing after retries aborts the whole run.
StrategyRun run_strategy(std::span<const QaInstance> instances, const StrategySpec& spec,
                         AnswerBackend& backend, const Tokenizer& tokenizer,
                         const RunOptions& options);

nlohmann::ordered_json audit_to_json(const EvaluationRecord& record, const InstanceAudit& audit);
void write_audit_jsonl(std::ostream& out, const StrategyRun& run);

}  // namespace effront
