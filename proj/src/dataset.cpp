#include "effront/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "effront/errors.hpp"
#include "effront/prng.hpp"
#include "json.hpp"

namespace effront {

namespace {

using nlohmann::json;

QaInstance parse_instance(const json& item) {
  QaInstance inst;
  inst.id = item.at("_id").get<std::string>();
  inst.question = item.at("question").get<std::string>();
  inst.gold_answer = item.at("answer").get<std::string>();
  for (const auto& pair : item.at("context")) {
    Document doc;
    doc.title = pair.at(0).get<std::string>();
    for (const auto& s : pair.at(1)) doc.sentences.push_back(s.get<std::string>());
    inst.documents.push_back(std::move(doc));
  }
  for (const auto& pair : item.at("supporting_facts")) {
    const auto idx = pair.at(1).get<std::int64_t>();
    if (idx < 0) throw DataError("negative supporting-fact sentence index");
    inst.supporting_facts.push_back({pair.at(0).get<std::string>(), static_cast<std::size_t>(idx)});
  }
  return inst;
}

}  // namespace

LoadedDataset parse_dataset(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed dataset JSON: ") + e.what());
  }
  if (!root.is_array()) throw DataError("dataset must be a JSON array");
  if (root.empty()) throw DataError("empty dataset");

  LoadedDataset out;
  for (const auto& item : root) {
    try {
      auto inst = parse_instance(item);
      if (instance_violations(inst).empty()) {
        out.instances.push_back(std::move(inst));
        continue;
      }
    } catch (const json::exception&) {
    } catch (const DataError&) {
    }
    ++out.dropped;
  }
  const double fraction = static_cast<double>(out.dropped) / static_cast<double>(root.size());
  if (fraction > kMaxDroppedFraction) {
    throw DataError("dropped " + std::to_string(out.dropped) + " of " +
                    std::to_string(root.size()) + " instances (more than 1%)");
  }
  return out;
}

LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::vector<QaInstance> sample_instances(std::span<const QaInstance> instances, std::size_t size,
                                         std::int64_t seed) {
  if (size == 0) throw ConfigError("sample size must be positive");
  if (size > instances.size()) {
    throw ConfigError("sample size " + std::to_string(size) + " exceeds dataset size " +
                      std::to_string(instances.size()));
  }
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(static_cast<std::uint64_t>(seed));
  for (std::size_t i = 0; i < size; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<QaInstance> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.push_back(instances[order[i]]);
  return out;
}

std::string dataset_to_json(std::span<const QaInstance> instances) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& inst : instances) {
    nlohmann::ordered_json item;
    item["_id"] = inst.id;
    item["question"] = inst.question;
    item["answer"] = inst.gold_answer;
    auto context = nlohmann::ordered_json::array();
    for (const auto& doc : inst.documents) context.push_back({doc.title, doc.sentences});
    item["context"] = std::move(context);
    auto facts = nlohmann::ordered_json::array();
    for (const auto& f : inst.supporting_facts) facts.push_back({f.title, f.sentence_index});
    item["supporting_facts"] = std::move(facts);
    root.push_back(std::move(item));
  }
  return root.dump(1);
}

namespace {

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo",
                                      "be", "da", "fu", "go", "hi", "ja", "pe", "zu"};

std::string make_word(SplitMix64& rng, int syllables) {
  std::string w;
  for (int i = 0; i < syllables; ++i) w += kSyllables[rng.below(std::size(kSyllables))];
  return w;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

std::vector<QaInstance> make_synthetic_dataset(std::size_t count, std::uint64_t seed,
                                               const SyntheticDatasetOptions& options) {
  if (options.supporting_documents == 0 ||
      options.supporting_documents > options.documents_per_instance ||
      options.sentences_per_document == 0 || options.words_per_sentence < 4) {
    throw ConfigError("invalid synthetic dataset options");
  }
  SplitMix64 rng(seed);
  std::vector<std::string> common;
  for (int i = 0; i < 400; ++i) common.push_back(make_word(rng, 2 + static_cast<int>(i % 2)));

  auto filler = [&](std::size_t n) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) {
      // Skewed draw so filler words are frequent and entity words stand out.
      const double u = rng.uniform();
      words.push_back(common[static_cast<std::size_t>(static_cast<double>(common.size()) * u * u * u)]);
    }
    return words;
  };
  auto join = [](const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s += ' ';
      s += w;
    }
    return s + ".";
  };

  std::vector<QaInstance> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    QaInstance inst;
    inst.id = "syn-" + std::to_string(n);
    const auto suffix = std::to_string(n);
    const std::string subject = capitalize(make_word(rng, 3)) + suffix;
    const std::string bridge = capitalize(make_word(rng, 3)) + suffix;
    inst.gold_answer = capitalize(make_word(rng, 3)) + suffix;
    inst.question = "Which place is linked to " + bridge + ", the partner of " + subject + "?";

    // Supporting documents occupy random slots.
    std::vector<std::size_t> slots(options.documents_per_instance);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t i = 0; i < options.supporting_documents; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(slots.size() - i));
      std::swap(slots[i], slots[j]);
    }
    std::vector<int> role(options.documents_per_instance, -1);
    for (std::size_t i = 0; i < options.supporting_documents; ++i) role[slots[i]] = static_cast<int>(i);

    for (std::size_t d = 0; d < options.documents_per_instance; ++d) {
      Document doc;
      doc.title = capitalize(make_word(rng, 2)) + " " + std::to_string(n) + "." + std::to_string(d);
      const auto support_sentence = static_cast<std::size_t>(rng.below(options.sentences_per_document));
      // A quarter of the distractors are hard negatives that mention one question entity once.
      const bool hard_negative = role[d] < 0 && rng.below(4) == 0;
      for (std::size_t s = 0; s < options.sentences_per_document; ++s) {
        const auto len = options.words_per_sentence - 2 + rng.below(5);
        auto words = filler(len);
        if (role[d] >= 0 && s == support_sentence) {
          // First hop names the subject and bridge; later hops name the bridge and answer.
          if (role[d] == 0) {
            words[0] = subject;
            words[words.size() / 2] = bridge;
          } else {
            words[0] = bridge;
            words[words.size() / 2] = inst.gold_answer;
          }
          // Evidence sentences are dense in named entities.
          for (int e = 0; e < 2; ++e) words.push_back(capitalize(make_word(rng, 3)) + suffix);
          inst.supporting_facts.push_back({doc.title, s});
        } else if (hard_negative && s == support_sentence) {
          words[rng.below(words.size())] = rng.below(2) == 0 ? subject : bridge;
        }
        doc.sentences.push_back(join(words));
      }
      inst.documents.push_back(std::move(doc));
    }
    // Supporting facts follow document order like HotpotQA's annotation.
    std::sort(inst.supporting_facts.begin(), inst.supporting_facts.end(),
              [&](const SupportingFact& a, const SupportingFact& b) {
                auto pos = [&](const std::string& t) {
                  for (std::size_t d = 0; d < inst.documents.size(); ++d) {
                    if (inst.documents[d].title == t) return d;
                  }
                  return inst.documents.size();
                };
                return pos(a.title) < pos(b.title);
              });
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace effront
