#include "effront/text.hpp"

#include <cctype>
#include <cstdint>

namespace effront {

std::vector<std::string> tokenize_terms(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else if (std::ispunct(c)) {
      continue;
    } else {
      current += static_cast<char>(std::tolower(c));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace effront
