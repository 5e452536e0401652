#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "effront/domain.hpp"

namespace effront {

inline constexpr std::size_t kDefaultRetrievalDepth = 16;

struct RankedContext {
  std::vector<std::size_t> selected;
  std::size_t budget = 0;
  std::vector<double> scores;
  /// Set when a query-aware ranking had no usable query terms and fell back to vanilla.
  bool fallback = false;
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// Bag-of-words tf-idf over a small corpus. tf is the raw count,
/// idf(t) = ln(D / df(t)) + 1, and document vectors are L2-normalized.
class TfIdfModel {
 public:
  /// Throws std::invalid_argument on an empty corpus.
  static TfIdfModel build(std::span<const std::string> documents);

  std::size_t document_count() const { return vectors_.size(); }
  std::size_t vocabulary_size() const { return idf_.size(); }
  /// Index of a term, or npos when out of vocabulary.
  std::size_t term_index(std::string_view term) const;
  double idf(std::string_view term) const;
  double idf(std::size_t term) const { return idf_[term]; }

  /// L2-normalized weights sorted by term index. Empty for token-less documents.
  const SparseVector& document_vector(std::size_t doc) const { return vectors_[doc]; }
  /// Sum of unnormalized tf-idf weights; the query-independent salience score.
  double salience(std::size_t doc) const { return salience_[doc]; }

  /// Query vector in corpus vocabulary; empty when no term is in vocabulary.
  SparseVector embed_query(std::string_view text) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::vector<double> idf_;
  std::vector<SparseVector> vectors_;
  std::vector<double> salience_;
};

double dot(const SparseVector& a, const SparseVector& b);

/// Top-k of `scores`, descending, ties by ascending index.
RankedContext top_k(std::span<const double> scores, std::size_t k);

RankedContext rank_vanilla(const TfIdfModel& model, std::size_t k);
RankedContext rank_query_aware(const TfIdfModel& model, std::string_view question, std::size_t k);

/// Text to fixed-dimension vector; deterministic for a given identity.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string identity() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Feature-hashing bag of words: each term adds 1 to bucket fnv1a64(term) % dim,
/// then the vector is L2-normalized. A model-free stand-in for dense embeddings.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256);
  std::string identity() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view text) const override;
  std::size_t bucket(std::string_view term) const;

 private:
  std::size_t dimension_;
};

/// Resolves an embedder identity such as "hash-bow-256". Throws ConfigError if unknown.
std::unique_ptr<Embedder> make_embedder(std::string_view identity);

double cosine(std::span<const double> a, std::span<const double> b);

RankedContext rank_embedding(const Embedder& embedder, std::span<const std::string> documents,
                             std::string_view question, std::size_t k);

/// Indices of the documents named by supporting facts, deduplicated, in document order.
/// Throws DataError when a supporting fact names a missing title.
std::vector<std::size_t> oracle_context(const QaInstance& instance);

}  // namespace effront
