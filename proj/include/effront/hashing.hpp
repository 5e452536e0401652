#pragma once

#include <string>
#include <string_view>

namespace effront {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
/// Throws DataError if the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace effront
