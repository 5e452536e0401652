#include "effront/domain.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "effront/errors.hpp"

namespace effront {

namespace {

struct StrategyNames {
  StrategyKind kind;
  std::string_view tag;
  std::string_view display;
};

constexpr StrategyNames kNames[] = {
    {StrategyKind::FullContext, "full_context", "Full-Context"},
    {StrategyKind::OracleRetrieval, "oracle", "Oracle Retrieval"},
    {StrategyKind::MemoryCompression, "memory_compression", "Mem. Comp."},
    {StrategyKind::TfIdfVanilla, "tfidf_vanilla", "TF-IDF"},
    {StrategyKind::TfIdfQueryAware, "tfidf_qa", "TF-IDF QA"},
    {StrategyKind::EmbeddingRetrieval, "embedding", "Embedding"},
};

const StrategyNames& names_for(StrategyKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n;
  }
  throw std::logic_error("unhandled StrategyKind");
}

bool valid_param_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string render_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Keys that identify how a record was produced rather than what was configured.
const std::set<std::string, std::less<>> kProvenanceKeys = {
    "backend", "tokenizer", "prompt", "embedder", "compressor", "compress_prompt"};

}  // namespace

std::string_view to_string(StrategyKind kind) { return names_for(kind).tag; }

std::optional<StrategyKind> parse_strategy(std::string_view tag) {
  for (const auto& n : kNames) {
    if (n.tag == tag) return n.kind;
  }
  return std::nullopt;
}

std::string_view display_name(StrategyKind kind) { return names_for(kind).display; }

bool has_preprocessing(StrategyKind kind) { return kind == StrategyKind::MemoryCompression; }

std::string render_param(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return render_real(v);
        } else {
          return quote(v);
        }
      },
      value);
}

ConfigDescriptor::ConfigDescriptor() = default;

ConfigDescriptor::ConfigDescriptor(std::map<std::string, ParamValue> params)
    : params_(std::move(params)) {
  for (const auto& [name, value] : params_) {
    if (!valid_param_name(name)) {
      throw std::invalid_argument("invalid parameter name '" + name + "'");
    }
    if (!canonical_id_.empty()) canonical_id_ += ',';
    canonical_id_ += name;
    canonical_id_ += '=';
    canonical_id_ += render_param(value);
  }
}

const ParamValue* ConfigDescriptor::find(std::string_view name) const {
  auto it = params_.find(std::string(name));
  return it == params_.end() ? nullptr : &it->second;
}

std::optional<std::int64_t> ConfigDescriptor::get_int(std::string_view name) const {
  const auto* v = find(name);
  if (v == nullptr) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  return std::nullopt;
}

std::optional<double> ConfigDescriptor::get_real(std::string_view name) const {
  const auto* v = find(name);
  if (v == nullptr) return std::nullopt;
  if (const auto* d = std::get_if<double>(v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(v)) return static_cast<double>(*i);
  return std::nullopt;
}

std::optional<std::string> ConfigDescriptor::get_string(std::string_view name) const {
  const auto* v = find(name);
  if (v == nullptr) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  return std::nullopt;
}

ConfigDescriptor ConfigDescriptor::with(const std::string& name, ParamValue value) const {
  auto params = params_;
  params[name] = std::move(value);
  return ConfigDescriptor(std::move(params));
}

std::vector<std::string> config_violations(const ConfigDescriptor& config) {
  std::vector<std::string> out;
  if (const auto* k = config.find("k")) {
    const auto* i = std::get_if<std::int64_t>(k);
    if (i == nullptr || *i < 1) out.emplace_back("retrieval depth k must be a positive integer");
  }
  if (config.find("ratio") != nullptr) {
    const auto r = config.get_real("ratio");
    if (!r || !(*r > 1.0)) out.emplace_back("compression ratio must exceed 1");
  }
  return out;
}

std::string EvaluationRecord::key() const {
  return std::string(to_string(strategy)) + "/" + config.canonical_id();
}

ReuseLevel::ReuseLevel(std::int64_t n) : n_(n) {
  if (n < 1) throw std::invalid_argument("reuse level N must be >= 1");
}

PreferenceWeight::PreferenceWeight(double w) : w_(w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("preference weight must lie in [0,1]");
}

std::string OperatingPoint::label() const {
  std::string out(display_name(strategy));
  std::vector<std::string> parts;
  for (const auto& [name, value] : config.parameters()) {
    if (kProvenanceKeys.contains(name)) continue;
    if (name == "ratio") {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%gx", *config.get_real("ratio"));
      parts.emplace_back(buf);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      parts.push_back(name + "=" + *s);
    } else {
      parts.push_back(name + "=" + render_param(value));
    }
  }
  if (!parts.empty()) {
    out += " (";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += ", ";
      out += parts[i];
    }
    out += ")";
  }
  return out;
}

std::vector<std::string> instance_violations(const QaInstance& instance) {
  std::vector<std::string> out;
  if (instance.id.empty()) out.emplace_back("instance id is empty");
  for (const auto& fact : instance.supporting_facts) {
    const Document* doc = nullptr;
    for (const auto& d : instance.documents) {
      if (d.title == fact.title) {
        doc = &d;
        break;
      }
    }
    if (doc == nullptr) {
      out.push_back("supporting fact title '" + fact.title + "' not among documents");
    } else if (fact.sentence_index >= doc->sentences.size()) {
      out.push_back("supporting fact index " + std::to_string(fact.sentence_index) +
                    " out of range for '" + fact.title + "'");
    }
  }
  return out;
}

Validation validate_record(const EvaluationRecord& r) {
  Validation v;
  auto& out = v.violations;
  if (!(r.stage2_tokens > 0.0)) out.emplace_back("stage2_tokens must be positive");
  if (!std::isfinite(r.stage2_tokens)) out.emplace_back("stage2_tokens must be finite");
  if (!(r.stage1_tokens >= 0.0) || !std::isfinite(r.stage1_tokens)) {
    out.emplace_back("stage1_tokens must be a nonnegative finite number");
  }
  if (!(r.f1 >= 0.0 && r.f1 <= 1.0)) out.emplace_back("f1 out of [0,1]");
  if (!(r.em >= 0.0 && r.em <= 1.0)) out.emplace_back("em out of [0,1]");
  if (r.n_instances < 1) out.emplace_back("n_instances must be positive");
  if (has_preprocessing(r.strategy)) {
    if (!(r.stage1_tokens > 0.0)) out.emplace_back("compression must report preprocessing cost");
  } else if (r.stage1_tokens != 0.0) {
    out.emplace_back("zero-cost strategy must report stage1_tokens = 0");
  }
  for (auto& msg : config_violations(r.config)) out.push_back(std::move(msg));
  return v;
}

nlohmann::ordered_json record_to_json(const EvaluationRecord& r) {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [name, value] : r.config.parameters()) {
    std::visit([&](const auto& v) { config[name] = v; }, value);
  }
  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(r.strategy));
  j["config"] = std::move(config);
  j["f1"] = r.f1;
  j["em"] = r.em;
  j["stage1_tokens"] = r.stage1_tokens;
  j["stage2_tokens"] = r.stage2_tokens;
  j["n_instances"] = r.n_instances;
  j["seed"] = r.seed;
  return j;
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing key '") + key + "'");
  return *it;
}

double require_number(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) throw DataError(std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t require_integer(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw DataError(std::string("key '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

}  // namespace

EvaluationRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("record must be a JSON object");
  EvaluationRecord r;
  const auto& tag = require(j, "strategy");
  if (!tag.is_string()) throw DataError("key 'strategy' must be a string");
  auto kind = parse_strategy(tag.get<std::string>());
  if (!kind) throw DataError("unknown strategy tag '" + tag.get<std::string>() + "'");
  r.strategy = *kind;

  const auto& config = require(j, "config");
  if (!config.is_object()) throw DataError("key 'config' must be an object");
  std::map<std::string, ParamValue> params;
  for (const auto& [name, value] : config.items()) {
    if (value.is_number_integer()) {
      params[name] = value.get<std::int64_t>();
    } else if (value.is_number_float()) {
      params[name] = value.get<double>();
    } else if (value.is_string()) {
      params[name] = value.get<std::string>();
    } else {
      throw DataError("config value for '" + name + "' must be a scalar or string");
    }
  }
  try {
    r.config = ConfigDescriptor(std::move(params));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  r.f1 = require_number(j, "f1");
  r.em = require_number(j, "em");
  r.stage1_tokens = require_number(j, "stage1_tokens");
  r.stage2_tokens = require_number(j, "stage2_tokens");
  r.n_instances = require_integer(j, "n_instances");
  r.seed = require_integer(j, "seed");
  return r;
}

void write_records_jsonl(std::ostream& out, std::span<const EvaluationRecord> records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<RecordLine> read_records_jsonl(std::istream& in) {
  std::vector<RecordLine> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back({number, record_from_json(nlohmann::json::parse(line))});
    } catch (const nlohmann::json::exception& e) {
      throw DataError("line " + std::to_string(number) + ": malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RecordLine> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read records file '" + path + "'");
  return read_records_jsonl(in);
}

}  // namespace effront
