#include "effront/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "effront/errors.hpp"
#include "effront/text.hpp"

namespace effront {

namespace {

void l2_normalize(SparseVector& v) {
  double norm = 0.0;
  for (const auto& [_, w] : v) norm += w * w;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (auto& [_, w] : v) w /= norm;
}

}  // namespace

TfIdfModel TfIdfModel::build(std::span<const std::string> documents) {
  if (documents.empty()) throw std::invalid_argument("cannot build tf-idf over an empty corpus");
  TfIdfModel model;
  std::vector<std::map<std::size_t, double>> counts(documents.size());
  std::vector<std::size_t> df;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (auto& term : tokenize_terms(documents[d])) {
      auto [it, inserted] = model.vocabulary_.try_emplace(std::move(term), df.size());
      if (inserted) df.push_back(0);
      auto& c = counts[d][it->second];
      if (c == 0.0) ++df[it->second];
      c += 1.0;
    }
  }
  const auto n_docs = static_cast<double>(documents.size());
  model.idf_.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) {
    model.idf_[t] = std::log(n_docs / static_cast<double>(df[t])) + 1.0;
  }
  model.vectors_.resize(documents.size());
  model.salience_.resize(documents.size(), 0.0);
  for (std::size_t d = 0; d < documents.size(); ++d) {
    auto& vec = model.vectors_[d];
    for (const auto& [term, tf] : counts[d]) {
      const double w = tf * model.idf_[term];
      vec.emplace_back(term, w);
      model.salience_[d] += w;
    }
    l2_normalize(vec);
  }
  return model;
}

std::size_t TfIdfModel::term_index(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  return it == vocabulary_.end() ? npos : it->second;
}

double TfIdfModel::idf(std::string_view term) const {
  const auto t = term_index(term);
  if (t == npos) throw std::out_of_range("term not in vocabulary");
  return idf_[t];
}

SparseVector TfIdfModel::embed_query(std::string_view text) const {
  std::map<std::size_t, double> counts;
  for (const auto& term : tokenize_terms(text)) {
    const auto t = term_index(term);
    if (t != npos) counts[t] += 1.0;
  }
  SparseVector v;
  for (const auto& [t, tf] : counts) v.emplace_back(t, tf * idf_[t]);
  l2_normalize(v);
  return v;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      sum += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

RankedContext top_k(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankedContext out;
  out.budget = k;
  const auto take = std::min(k, order.size());
  for (std::size_t i = 0; i < take; ++i) {
    out.selected.push_back(order[i]);
    out.scores.push_back(scores[order[i]]);
  }
  return out;
}

RankedContext rank_vanilla(const TfIdfModel& model, std::size_t k) {
  std::vector<double> scores(model.document_count());
  for (std::size_t d = 0; d < scores.size(); ++d) scores[d] = model.salience(d);
  return top_k(scores, k);
}

RankedContext rank_query_aware(const TfIdfModel& model, std::string_view question, std::size_t k) {
  const auto query = model.embed_query(question);
  if (query.empty()) {
    auto out = rank_vanilla(model, k);
    out.fallback = true;
    return out;
  }
  std::vector<double> scores(model.document_count());
  for (std::size_t d = 0; d < scores.size(); ++d) scores[d] = dot(query, model.document_vector(d));
  return top_k(scores, k);
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

std::string HashingEmbedder::identity() const { return "hash-bow-" + std::to_string(dimension_); }

std::size_t HashingEmbedder::bucket(std::string_view term) const {
  return static_cast<std::size_t>(fnv1a64(term) % dimension_);
}

std::vector<double> HashingEmbedder::embed(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& term : tokenize_terms(text)) v[bucket(term)] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

std::unique_ptr<Embedder> make_embedder(std::string_view identity) {
  constexpr std::string_view prefix = "hash-bow-";
  if (identity.starts_with(prefix)) {
    const auto digits = identity.substr(prefix.size());
    std::size_t dim = 0;
    bool ok = !digits.empty();
    for (char c : digits) {
      if (c < '0' || c > '9') {
        ok = false;
        break;
      }
      dim = dim * 10 + static_cast<std::size_t>(c - '0');
    }
    if (ok && dim > 0) return std::make_unique<HashingEmbedder>(dim);
  }
  throw ConfigError("unknown embedder '" + std::string(identity) + "'");
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

RankedContext rank_embedding(const Embedder& embedder, std::span<const std::string> documents,
                             std::string_view question, std::size_t k) {
  const auto q = embedder.embed(question);
  std::vector<double> scores(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    scores[d] = cosine(q, embedder.embed(documents[d]));
  }
  return top_k(scores, k);
}

std::vector<std::size_t> oracle_context(const QaInstance& instance) {
  std::vector<bool> chosen(instance.documents.size(), false);
  for (const auto& fact : instance.supporting_facts) {
    bool found = false;
    for (std::size_t d = 0; d < instance.documents.size(); ++d) {
      if (instance.documents[d].title == fact.title) {
        chosen[d] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw DataError("instance '" + instance.id + "': supporting fact title '" + fact.title +
                      "' not among documents");
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < chosen.size(); ++d) {
    if (chosen[d]) out.push_back(d);
  }
  return out;
}

}  // namespace effront
