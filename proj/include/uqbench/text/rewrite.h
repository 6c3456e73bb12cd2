#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/backend/backend.h"
#include "uqbench/core/kinds.h"

namespace uqbench::text {

struct RewritePrompt {
  std::string system_text;
  double temperature = 0.7;
  int max_retries = 3;  // after the first attempt

  // The INV or SBJ prompt; throws ParameterError for lexical kinds.
  static RewritePrompt for_kind(TextualKind kind);
};

// The user turn sent with a rewrite prompt.
std::string rewrite_user_text(const std::string& question, TextualKind kind);

// Cleans a raw completion: trims whitespace and quotes and drops an echoed
// "Rewritten (INV):" label.
std::string clean_rewrite(const std::string& raw);

// Accepts a cleaned rewrite when it is non-empty, differs from the source
// and ends with "?".
bool valid_rewrite(const std::string& source, const std::string& rewrite);

// Asks the LLM for an INV or SBJ rewrite, retrying with the same prompt
// until one validates. TransportError propagates; exhausting retries throws
// RewriteFailedError carrying the last raw response.
std::string rewrite_question(
    const std::string& question, TextualKind kind, backend::Backend& llm,
    const RewritePrompt& prompt,
    const std::optional<std::vector<std::uint8_t>>& image = std::nullopt);

std::string rewrite_question(
    const std::string& question, TextualKind kind, backend::Backend& llm,
    const std::optional<std::vector<std::uint8_t>>& image = std::nullopt);

}  // namespace uqbench::text
