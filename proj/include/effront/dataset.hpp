#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "effront/domain.hpp"

namespace effront {

struct LoadedDataset {
  std::vector<QaInstance> instances;
  std::size_t dropped = 0;
};

/// Fraction of invalid instances above which loading fails.
inline constexpr double kMaxDroppedFraction = 0.01;

/// Parses HotpotQA distractor-format JSON: an array of objects with `_id`,
/// `question`, `answer`, `context` ([title, [sentences]] pairs) and
/// `supporting_facts` ([title, sentence_index] pairs). Instances that violate
/// the QaInstance invariants are dropped and counted.
///
/// Throws DataError for unreadable or malformed input, an empty array, or more
/// than kMaxDroppedFraction dropped instances.
LoadedDataset parse_dataset(std::string_view json_text);
LoadedDataset load_dataset(const std::string& path);

/// Uniform sample without replacement: a partial Fisher-Yates shuffle of
/// instance positions driven by SplitMix64(seed). Returned in draw order.
/// Throws ConfigError if size is zero or exceeds the population.
std::vector<QaInstance> sample_instances(std::span<const QaInstance> instances, std::size_t size,
                                         std::int64_t seed);

std::string dataset_to_json(std::span<const QaInstance> instances);

struct SyntheticDatasetOptions {
  std::size_t documents_per_instance = 10;
  std::size_t sentences_per_document = 4;
  std::size_t words_per_sentence = 10;
  std::size_t supporting_documents = 2;
};

/// Deterministic HotpotQA-shaped instances for desk-scale runs. Supporting
/// sentences carry instance-specific entity words that also appear in the
/// question, so retrieval quality varies with depth and ranking method.
std::vector<QaInstance> make_synthetic_dataset(std::size_t count, std::uint64_t seed,
                                               const SyntheticDatasetOptions& options = {});

}  // namespace effront
