#pragma once

#include <span>
#include <string>
#include <string_view>

#include "effront/domain.hpp"

namespace effront {

/// A versioned prompt template with `{placeholder}` slots.
struct PromptTemplate {
  std::string_view version;
  std::string_view text;

  /// SHA-256 of the template text.
  std::string hash() const;
  /// First 12 hex digits of hash(); recorded in record configs.
  std::string short_hash() const;
};

const PromptTemplate& answer_template();
const PromptTemplate& compression_template();

/// Documents as "[title]\n<sentences joined by spaces>" blocks separated by blank lines.
std::string render_documents(std::span<const Document> documents);

std::string render_answer_prompt(std::string_view question, std::string_view context);
std::string render_compression_prompt(std::string_view context, double ratio);

}  // namespace effront
