#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace effront {

/// Lowercase, drop ASCII punctuation, split on whitespace. Articles are kept.
std::vector<std::string> tokenize_terms(std::string_view text);

/// 64-bit FNV-1a; stable across platforms, used for feature hashing and seeding.
std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace effront
