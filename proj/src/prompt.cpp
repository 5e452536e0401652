#include "effront/prompt.hpp"

#include <cstdio>
#include <initializer_list>

#include "effront/hashing.hpp"

namespace effront {

namespace {

constexpr PromptTemplate kAnswerV1{
    "answer-v1",
    "Answer the question using only the context below. "
    "Respond with the answer span only, without explanation.\n"
    "\n"
    "Context:\n"
    "{context}\n"
    "\n"
    "Question: {question}\n"
    "Answer:"};

constexpr PromptTemplate kCompressV1{
    "compress-v1",
    "Condense the following context to about 1/{ratio} of its length. "
    "Keep every fact needed to answer multi-hop questions about it. "
    "Output only the condensed text.\n"
    "\n"
    "{context}"};

struct Slot {
  std::string_view name;
  std::string_view value;
};

// Single pass over the template, so substituted values are never re-expanded.
std::string substitute(std::string_view text, std::initializer_list<Slot> slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool matched = false;
    if (text[pos] == '{') {
      for (const auto& slot : slots) {
        if (text.substr(pos).starts_with(slot.name)) {
          out.append(slot.value);
          pos += slot.name.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += text[pos++];
  }
  return out;
}

}  // namespace

std::string PromptTemplate::hash() const { return sha256_hex(text); }
std::string PromptTemplate::short_hash() const { return hash().substr(0, 12); }

const PromptTemplate& answer_template() { return kAnswerV1; }
const PromptTemplate& compression_template() { return kCompressV1; }

std::string render_documents(std::span<const Document> documents) {
  std::string out;
  for (const auto& doc : documents) {
    if (!out.empty()) out += "\n\n";
    out += '[';
    out += doc.title;
    out += "]\n";
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      if (i > 0) out += ' ';
      out += doc.sentences[i];
    }
  }
  return out;
}

std::string render_answer_prompt(std::string_view question, std::string_view context) {
  return substitute(kAnswerV1.text, {{"{context}", context}, {"{question}", question}});
}

std::string render_compression_prompt(std::string_view context, double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", ratio);
  return substitute(kCompressV1.text, {{"{ratio}", buf}, {"{context}", context}});
}

}  // namespace effront
