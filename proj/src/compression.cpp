#include "effront/compression.hpp"

#include <algorithm>
#include <numeric>

#include "effront/errors.hpp"
#include "effront/prompt.hpp"
#include "effront/retrieval.hpp"

namespace effront {

void validate(const CompressionConfig& config) {
  if (!(config.ratio > 1.0)) throw ConfigError("compression ratio must exceed 1");
  if (config.compressor != "extractive" && config.compressor != "llm") {
    throw ConfigError("unknown compressor '" + config.compressor + "'");
  }
}

std::string flatten_sentences(std::span<const Document> context) {
  std::string out;
  for (const auto& doc : context) {
    for (const auto& s : doc.sentences) {
      if (!out.empty()) out += ' ';
      out += s;
    }
  }
  return out;
}

CompressedContext ExtractiveCompressor::compress(std::span<const Document> context, double ratio,
                                                 const Tokenizer& tokenizer) const {
  std::vector<SentenceRef> refs;
  std::vector<std::string> sentences;
  for (std::size_t d = 0; d < context.size(); ++d) {
    for (std::size_t s = 0; s < context[d].sentences.size(); ++s) {
      refs.push_back({d, s});
      sentences.push_back(context[d].sentences[s]);
    }
  }
  CompressedContext out;
  out.input_tokens = tokenizer.count(flatten_sentences(context));
  if (sentences.empty()) {
    out.stage1_cost = out.input_tokens;
    return out;
  }

  const auto model = TfIdfModel::build(sentences);
  const auto ranked = rank_vanilla(model, sentences.size());
  const double target = out.input_tokens / ratio;
  std::vector<std::size_t> chosen;
  double kept_tokens = 0.0;
  for (std::size_t idx : ranked.selected) {
    if (kept_tokens >= target) break;
    chosen.push_back(idx);
    kept_tokens += tokenizer.count(sentences[idx]);
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t idx : chosen) {
    if (!out.text.empty()) out.text += ' ';
    out.text += sentences[idx];
    out.kept.push_back(refs[idx]);
  }
  out.output_tokens = tokenizer.count(out.text);
  out.stage1_cost = out.input_tokens + out.output_tokens;
  return out;
}

LlmCompressor::LlmCompressor(AnswerBackend& backend, RetryPolicy retry)
    : backend_(backend), retry_(retry) {}

std::string LlmCompressor::identity() const {
  return "llm:" + backend_.identity() + ":" + compression_template().short_hash();
}

CompressedContext LlmCompressor::compress(std::span<const Document> context, double ratio,
                                          const Tokenizer& tokenizer) const {
  const auto body = render_documents(context);
  AnswerRequest request;
  request.prompt = render_compression_prompt(body, ratio);
  request.context = body;
  CompressedContext out;
  out.text = call_with_retry([&] { return backend_.complete(request); }, retry_);
  out.input_tokens = tokenizer.count(request.prompt);
  out.output_tokens = tokenizer.count(out.text);
  if (out.output_tokens > out.input_tokens) {
    throw BackendError("compressor reply is longer than its input", false);
  }
  out.stage1_cost = out.input_tokens + out.output_tokens;
  return out;
}

CompressedContext compress(std::span<const Document> context, const CompressionConfig& config,
                           const Compressor& compressor, const Tokenizer& tokenizer) {
  validate(config);
  const bool empty = std::all_of(context.begin(), context.end(),
                                 [](const Document& d) { return d.sentences.empty(); });
  if (empty) throw DataError("cannot compress an empty context");
  return compressor.compress(context, config.ratio, tokenizer);
}

}  // namespace effront
