#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace effront {

enum class StrategyKind {
  FullContext,
  OracleRetrieval,
  MemoryCompression,
  TfIdfVanilla,
  TfIdfQueryAware,
  EmbeddingRetrieval,
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::FullContext,     StrategyKind::OracleRetrieval,
    StrategyKind::MemoryCompression, StrategyKind::TfIdfVanilla,
    StrategyKind::TfIdfQueryAware, StrategyKind::EmbeddingRetrieval,
};

/// Stable tag used in records files and on the command line ("tfidf_qa", ...).
std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view tag);
/// Human-facing label used in reports ("TF-IDF QA", "Mem. Comp.", ...).
std::string_view display_name(StrategyKind kind);
/// Only strategies with a preprocessing pass incur stage-1 tokens.
bool has_preprocessing(StrategyKind kind);

using ParamValue = std::variant<std::int64_t, double, std::string>;

/// Ordered parameter map of a strategy configuration plus its canonical id.
///
/// The canonical id lists parameters sorted by name as `name=value` joined by
/// commas. Integers render as decimal, reals as their shortest round-trip form
/// with a mandatory decimal point or exponent, strings double-quoted with
/// escapes. The rendering is injective over parameter maps.
class ConfigDescriptor {
 public:
  ConfigDescriptor();
  explicit ConfigDescriptor(std::map<std::string, ParamValue> params);

  const std::map<std::string, ParamValue>& parameters() const { return params_; }
  const std::string& canonical_id() const { return canonical_id_; }
  bool empty() const { return params_.empty(); }

  const ParamValue* find(std::string_view name) const;
  std::optional<std::int64_t> get_int(std::string_view name) const;
  /// Integers are promoted.
  std::optional<double> get_real(std::string_view name) const;
  std::optional<std::string> get_string(std::string_view name) const;

  ConfigDescriptor with(const std::string& name, ParamValue value) const;

  friend bool operator==(const ConfigDescriptor& a, const ConfigDescriptor& b) {
    return a.params_ == b.params_;
  }

 private:
  std::map<std::string, ParamValue> params_;
  std::string canonical_id_;
};

std::string render_param(const ParamValue& value);
/// Invariant checks on well-known keys: `k` positive integer, `ratio` > 1.
std::vector<std::string> config_violations(const ConfigDescriptor& config);

struct EvaluationRecord {
  StrategyKind strategy = StrategyKind::FullContext;
  ConfigDescriptor config;
  double f1 = 0.0;
  double em = 0.0;
  double stage1_tokens = 0.0;
  double stage2_tokens = 0.0;
  std::int64_t n_instances = 0;
  std::int64_t seed = 0;

  /// "<strategy>/<canonical_id>"
  std::string key() const;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

class ReuseLevel {
 public:
  explicit ReuseLevel(std::int64_t n);
  std::int64_t n() const { return n_; }
  friend auto operator<=>(const ReuseLevel&, const ReuseLevel&) = default;

 private:
  std::int64_t n_;
};

class PreferenceWeight {
 public:
  explicit PreferenceWeight(double w);
  double value() const { return w_; }

 private:
  double w_;
};

/// A record projected under a reuse level.
struct OperatingPoint {
  std::size_t record_index = 0;
  StrategyKind strategy = StrategyKind::FullContext;
  ConfigDescriptor config;
  ReuseLevel reuse{1};
  double effective_tokens = 1.0;
  double log_cost = 0.0;
  double f1 = 0.0;

  /// Display label such as "TF-IDF QA (k=16)".
  std::string label() const;
};

struct Document {
  std::string title;
  std::vector<std::string> sentences;
};

struct SupportingFact {
  std::string title;
  std::size_t sentence_index = 0;
};

struct QaInstance {
  std::string id;
  std::string question;
  std::string gold_answer;
  std::vector<Document> documents;
  std::vector<SupportingFact> supporting_facts;
};

std::vector<std::string> instance_violations(const QaInstance& instance);

struct Validation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

Validation validate_record(const EvaluationRecord& record);

nlohmann::ordered_json record_to_json(const EvaluationRecord& record);
/// Throws DataError on missing keys, wrong types, or an unknown strategy tag.
EvaluationRecord record_from_json(const nlohmann::json& j);

void write_records_jsonl(std::ostream& out, std::span<const EvaluationRecord> records);

struct RecordLine {
  std::size_t line_number = 0;
  EvaluationRecord record;
};

/// Parses one record per non-blank line. Parse failures throw DataError naming the line.
std::vector<RecordLine> read_records_jsonl(std::istream& in);
std::vector<RecordLine> read_records_file(const std::string& path);

}  // namespace effront
