#include "effront/tokenizer.hpp"

#include <cctype>

#include "effront/errors.hpp"

namespace effront {

namespace {

enum class CharClass { Space, Word, Punct };

CharClass classify(char raw) {
  const auto c = static_cast<unsigned char>(raw);
  if (std::isspace(c)) return CharClass::Space;
  if (std::isalnum(c) || c == '_' || c >= 0x80) return CharClass::Word;
  return CharClass::Punct;
}

const WhitespaceTokenizer kWhitespace;
const WordPunctTokenizer kWordPunct;

}  // namespace

double WhitespaceTokenizer::count(std::string_view text) const {
  double n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = classify(c) == CharClass::Space;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

double WordPunctTokenizer::count(std::string_view text) const {
  double n = 0;
  CharClass prev = CharClass::Space;
  for (char c : text) {
    const auto cls = classify(c);
    if (cls != CharClass::Space && cls != prev) ++n;
    prev = cls;
  }
  return n;
}

const Tokenizer& tokenizer_for(std::string_view identity) {
  if (identity == kWhitespace.identity()) return kWhitespace;
  if (identity == kWordPunct.identity()) return kWordPunct;
  throw ConfigError("unknown tokenizer '" + std::string(identity) + "'");
}

std::vector<std::string_view> tokenizer_identities() {
  return {kWhitespace.identity(), kWordPunct.identity()};
}

double count_tokens(std::string_view text, std::string_view identity) {
  return tokenizer_for(identity).count(text);
}

}  // namespace effront
