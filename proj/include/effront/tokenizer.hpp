#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace effront {

/// Token counter. Implementations are stateless and thread-safe.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::string_view identity() const = 0;
  virtual double count(std::string_view text) const = 0;
};

/// Runs of non-whitespace characters. The default.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::string_view identity() const override { return "whitespace"; }
  double count(std::string_view text) const override;
};

/// Runs of word characters and runs of punctuation counted separately.
class WordPunctTokenizer final : public Tokenizer {
 public:
  std::string_view identity() const override { return "wordpunct"; }
  double count(std::string_view text) const override;
};

inline constexpr std::string_view kDefaultTokenizer = "whitespace";

/// Throws ConfigError for an unknown identity.
const Tokenizer& tokenizer_for(std::string_view identity);
std::vector<std::string_view> tokenizer_identities();

double count_tokens(std::string_view text, std::string_view identity = kDefaultTokenizer);

}  // namespace effront
