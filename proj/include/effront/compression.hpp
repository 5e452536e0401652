#pragma once

#include <span>
#include <string>
#include <vector>

#include "effront/backend.hpp"
#include "effront/domain.hpp"
#include "effront/tokenizer.hpp"

namespace effront {

struct CompressionConfig {
  /// Target input/output token ratio; must exceed 1.
  double ratio = 2.0;
  /// "extractive" or "llm".
  std::string compressor = "extractive";
};

void validate(const CompressionConfig& config);

struct SentenceRef {
  std::size_t document = 0;
  std::size_t sentence = 0;
};

struct CompressedContext {
  std::string text;
  double input_tokens = 0.0;
  double output_tokens = 0.0;
  /// input_tokens + output_tokens
  double stage1_cost = 0.0;
  /// Kept sentences in original order (extractive compressor only).
  std::vector<SentenceRef> kept;
};

/// All sentences of all documents joined by single spaces; the compressor input text.
std::string flatten_sentences(std::span<const Document> context);

class Compressor {
 public:
  virtual ~Compressor() = default;
  virtual std::string identity() const = 0;
  virtual CompressedContext compress(std::span<const Document> context, double ratio,
                                     const Tokenizer& tokenizer) const = 0;
};

/// Keeps the most salient sentences (query-agnostic tf-idf over the sentences of
/// the context, ties by position) until the kept token count reaches
/// input/ratio, then emits them in original order.
class ExtractiveCompressor final : public Compressor {
 public:
  std::string identity() const override { return "extractive"; }
  CompressedContext compress(std::span<const Document> context, double ratio,
                             const Tokenizer& tokenizer) const override;
};

/// Sends the versioned compression prompt through an answer backend. Input
/// tokens are the full prompt, output tokens the reply.
class LlmCompressor final : public Compressor {
 public:
  LlmCompressor(AnswerBackend& backend, RetryPolicy retry = {});
  std::string identity() const override;
  CompressedContext compress(std::span<const Document> context, double ratio,
                             const Tokenizer& tokenizer) const override;

 private:
  AnswerBackend& backend_;
  RetryPolicy retry_;
};

/// Validates the config and rejects an empty context (DataError), then delegates.
CompressedContext compress(std::span<const Document> context, const CompressionConfig& config,
                           const Compressor& compressor, const Tokenizer& tokenizer);

}  // namespace effront
