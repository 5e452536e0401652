#include "effront/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

#include "effront/compression.hpp"
#include "effront/errors.hpp"
#include "effront/metrics.hpp"
#include "effront/prompt.hpp"
#include "effront/retrieval.hpp"

namespace effront {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

ParamValue parse_value(const std::string& text) {
  if (!text.empty()) {
    char* end = nullptr;
    const long long i = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() + text.size()) return static_cast<std::int64_t>(i);
    const double d = std::strtod(text.c_str(), &end);
    if (end == text.c_str() + text.size()) return d;
  }
  return text;
}

const std::set<std::string>& allowed_keys(StrategyKind kind) {
  static const std::set<std::string> none;
  static const std::set<std::string> retrieval = {"k", "unit"};
  static const std::set<std::string> embedding = {"k", "unit", "embedder"};
  static const std::set<std::string> compression = {"ratio", "compressor"};
  switch (kind) {
    case StrategyKind::TfIdfVanilla:
    case StrategyKind::TfIdfQueryAware:
      return retrieval;
    case StrategyKind::EmbeddingRetrieval:
      return embedding;
    case StrategyKind::MemoryCompression:
      return compression;
    default:
      return none;
  }
}

StrategySpec finalize(StrategyKind kind, std::map<std::string, ParamValue> params) {
  const auto& allowed = allowed_keys(kind);
  for (const auto& [key, _] : params) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' for strategy '" + std::string(to_string(kind)) +
                        "'");
    }
  }
  auto require_string = [&](const char* key) -> std::string {
    const auto* s = std::get_if<std::string>(&params[key]);
    if (s == nullptr) throw ConfigError(std::string("'") + key + "' must be a name");
    return *s;
  };
  if (allowed.contains("k")) {
    auto [it, _] = params.try_emplace("k", static_cast<std::int64_t>(kDefaultRetrievalDepth));
    const auto* k = std::get_if<std::int64_t>(&it->second);
    if (k == nullptr || *k < 1) throw ConfigError("retrieval depth k must be a positive integer");
  }
  if (allowed.contains("unit")) {
    params.try_emplace("unit", std::string("document"));
    const auto unit = require_string("unit");
    if (unit != "document" && unit != "sentence") {
      throw ConfigError("unit must be 'document' or 'sentence'");
    }
  }
  if (allowed.contains("embedder")) {
    params.try_emplace("embedder", std::string("hash-bow-256"));
    make_embedder(require_string("embedder"));
  }
  if (allowed.contains("ratio")) {
    auto [it, _] = params.try_emplace("ratio", 2.0);
    double ratio = 0.0;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
      ratio = static_cast<double>(*i);
    } else if (const auto* d = std::get_if<double>(&it->second)) {
      ratio = *d;
    } else {
      throw ConfigError("ratio must be a number");
    }
    it->second = ratio;
    params.try_emplace("compressor", std::string("extractive"));
    validate(CompressionConfig{ratio, require_string("compressor")});
  }
  return {kind, ConfigDescriptor(std::move(params))};
}

std::string document_text(const Document& doc) {
  std::string s = doc.title;
  for (const auto& sentence : doc.sentences) {
    s += ' ';
    s += sentence;
  }
  return s;
}

RankedContext rank(const StrategySpec& spec, std::span<const std::string> corpus,
                   std::string_view question, std::size_t k) {
  switch (spec.kind) {
    case StrategyKind::TfIdfVanilla:
      return rank_vanilla(TfIdfModel::build(corpus), k);
    case StrategyKind::TfIdfQueryAware:
      return rank_query_aware(TfIdfModel::build(corpus), question, k);
    case StrategyKind::EmbeddingRetrieval: {
      const auto embedder = make_embedder(*spec.config.get_string("embedder"));
      return rank_embedding(*embedder, corpus, question, k);
    }
    default:
      throw std::logic_error("not a ranking strategy");
  }
}

BuiltContext from_documents(const QaInstance& instance, std::vector<std::size_t> indices) {
  std::vector<Document> docs;
  for (auto i : indices) docs.push_back(instance.documents[i]);
  return {render_documents(docs), 0.0, std::move(indices)};
}

BuiltContext retrieve(const QaInstance& instance, const StrategySpec& spec) {
  const auto k = static_cast<std::size_t>(*spec.config.get_int("k"));
  const bool by_sentence = spec.config.get_string("unit") == "sentence";
  if (instance.documents.empty()) return {};
  if (!by_sentence) {
    std::vector<std::string> corpus;
    for (const auto& doc : instance.documents) corpus.push_back(document_text(doc));
    auto ranked = rank(spec, corpus, instance.question, k);
    std::sort(ranked.selected.begin(), ranked.selected.end());
    return from_documents(instance, std::move(ranked.selected));
  }
  std::vector<std::string> corpus;
  std::vector<std::pair<std::size_t, std::size_t>> refs;
  for (std::size_t d = 0; d < instance.documents.size(); ++d) {
    for (std::size_t s = 0; s < instance.documents[d].sentences.size(); ++s) {
      corpus.push_back(instance.documents[d].sentences[s]);
      refs.emplace_back(d, s);
    }
  }
  if (corpus.empty()) return {};
  auto ranked = rank(spec, corpus, instance.question, k);
  std::sort(ranked.selected.begin(), ranked.selected.end());
  std::vector<Document> docs;
  std::vector<std::size_t> doc_indices;
  for (auto idx : ranked.selected) {
    const auto [d, s] = refs[idx];
    if (doc_indices.empty() || doc_indices.back() != d) {
      doc_indices.push_back(d);
      docs.push_back({instance.documents[d].title, {}});
    }
    docs.back().sentences.push_back(instance.documents[d].sentences[s]);
  }
  return {render_documents(docs), 0.0, std::move(doc_indices)};
}

}  // namespace

std::vector<StrategySpec> parse_strategy_list(std::string_view text) {
  std::vector<StrategySpec> out;
  std::optional<StrategyKind> current;
  std::map<std::string, ParamValue> params;
  auto flush = [&] {
    if (current) out.push_back(finalize(*current, std::move(params)));
    params.clear();
  };
  auto add_param = [&](const std::string& token) {
    const auto eq = token.find('=');
    const auto key = trim(token.substr(0, eq));
    const auto value = trim(token.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty parameter name in '" + token + "'");
    if (params.contains(key)) throw ConfigError("duplicate parameter '" + key + "'");
    params[key] = parse_value(value);
  };
  for (const auto& raw : split(text, ',')) {
    const auto token = trim(raw);
    if (token.empty()) throw ConfigError("empty entry in strategy list '" + std::string(text) + "'");
    const auto colon = token.find(':');
    const auto eq = token.find('=');
    if (colon != std::string::npos || eq == std::string::npos) {
      flush();
      const auto name = trim(token.substr(0, colon));
      current = parse_strategy(name);
      if (!current) throw ConfigError("unknown strategy '" + name + "'");
      if (colon != std::string::npos) add_param(token.substr(colon + 1));
    } else {
      if (!current) throw ConfigError("parameter '" + token + "' before any strategy name");
      add_param(token);
    }
  }
  flush();
  return out;
}

std::string strategy_grammar_help() {
  return "Strategy list grammar: name[:key=value][,key=value...][,name...]\n"
         "  full_context                 all documents\n"
         "  oracle                       supporting documents only\n"
         "  tfidf_vanilla:k=16           query-independent tf-idf salience, top-k\n"
         "  tfidf_qa:k=16                tf-idf cosine to the question, top-k\n"
         "  embedding:k=16               embedding cosine, embedder=hash-bow-256\n"
         "  memory_compression:ratio=2   compressor=extractive|llm\n"
         "  retrieval strategies accept unit=document|sentence";
}

BuiltContext build_context(const QaInstance& instance, const StrategySpec& spec,
                           AnswerBackend& backend, const Tokenizer& tokenizer,
                           const RetryPolicy& retry) {
  switch (spec.kind) {
    case StrategyKind::FullContext: {
      std::vector<std::size_t> all(instance.documents.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      return from_documents(instance, std::move(all));
    }
    case StrategyKind::OracleRetrieval:
      return from_documents(instance, oracle_context(instance));
    case StrategyKind::TfIdfVanilla:
    case StrategyKind::TfIdfQueryAware:
    case StrategyKind::EmbeddingRetrieval:
      return retrieve(instance, spec);
    case StrategyKind::MemoryCompression: {
      const CompressionConfig config{*spec.config.get_real("ratio"),
                                     *spec.config.get_string("compressor")};
      CompressedContext compressed;
      if (config.compressor == "llm") {
        compressed = compress(instance.documents, config, LlmCompressor(backend, retry), tokenizer);
      } else {
        compressed = compress(instance.documents, config, ExtractiveCompressor{}, tokenizer);
      }
      BuiltContext out{std::move(compressed.text), compressed.stage1_cost, {}};
      for (const auto& ref : compressed.kept) {
        if (out.documents.empty() || out.documents.back() != ref.document) {
          out.documents.push_back(ref.document);
        }
      }
      return out;
    }
  }
  throw std::logic_error("unhandled strategy");
}

StrategyRun run_strategy(std::span<const QaInstance> instances, const StrategySpec& spec,
                         AnswerBackend& backend, const Tokenizer& tokenizer,
                         const RunOptions& options) {
  if (instances.empty()) throw ConfigError("no instances to evaluate");
  if (spec.kind == StrategyKind::MemoryCompression &&
      spec.config.get_string("compressor") == "llm" &&
      backend.identity().starts_with("synthetic")) {
    throw ConfigError("llm compression needs a language-model backend");
  }

  std::vector<std::optional<InstanceAudit>> results(instances.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= instances.size() || failed.load()) return;
      try {
        const auto& inst = instances[i];
        auto context = build_context(inst, spec, backend, tokenizer, options.retry);
        AnswerRequest request;
        request.prompt = render_answer_prompt(inst.question, context.text);
        request.context = context.text;
        request.instance = &inst;
        request.seed = options.seed;
        auto answer = call_with_retry([&] { return backend.complete(request); }, options.retry);
        const auto score = answer_f1(answer, inst.gold_answer);
        InstanceAudit audit;
        audit.instance_id = inst.id;
        audit.prompt_tokens = tokenizer.count(request.prompt);
        audit.completion_tokens = tokenizer.count(answer);
        audit.stage1_tokens = context.stage1_tokens;
        audit.f1 = score.f1;
        audit.em = score.em;
        audit.answer = std::move(answer);
        audit.context_documents = std::move(context.documents);
        results[i] = std::move(audit);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const auto workers = std::clamp<std::size_t>(options.workers, 1, instances.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  StrategyRun run;
  for (auto& r : results) run.audit.push_back(std::move(*r));
  std::stable_sort(run.audit.begin(), run.audit.end(),
                   [](const InstanceAudit& a, const InstanceAudit& b) {
                     return a.instance_id < b.instance_id;
                   });

  auto config = spec.config.with("backend", backend.identity())
                    .with("tokenizer", std::string(tokenizer.identity()))
                    .with("prompt", answer_template().short_hash());
  if (spec.kind == StrategyKind::MemoryCompression &&
      spec.config.get_string("compressor") == "llm") {
    config = config.with("compress_prompt", compression_template().short_hash());
  }

  auto& record = run.record;
  record.strategy = spec.kind;
  record.config = std::move(config);
  record.n_instances = static_cast<std::int64_t>(run.audit.size());
  record.seed = options.seed;
  std::vector<AnswerScore> scores;
  double stage1 = 0.0;
  double stage2 = 0.0;
  for (const auto& a : run.audit) {
    scores.push_back({a.f1, a.em});
    stage1 += a.stage1_tokens;
    stage2 += a.prompt_tokens + a.completion_tokens;
  }
  const auto agg = aggregate_scores(scores);
  const auto n = static_cast<double>(run.audit.size());
  record.f1 = agg.mean_f1;
  record.em = agg.mean_em;
  record.stage1_tokens = stage1 / n;
  record.stage2_tokens = stage2 / n;
  return run;
}

nlohmann::ordered_json audit_to_json(const EvaluationRecord& record, const InstanceAudit& a) {
  nlohmann::ordered_json j;
  j["record"] = record.key();
  j["instance_id"] = a.instance_id;
  j["prompt_tokens"] = a.prompt_tokens;
  j["completion_tokens"] = a.completion_tokens;
  j["stage1_tokens"] = a.stage1_tokens;
  j["f1"] = a.f1;
  j["em"] = a.em;
  j["answer"] = a.answer;
  j["context_documents"] = a.context_documents;
  return j;
}

void write_audit_jsonl(std::ostream& out, const StrategyRun& run) {
  for (const auto& a : run.audit) out << audit_to_json(run.record, a).dump() << '\n';
}

}  // namespace effront
