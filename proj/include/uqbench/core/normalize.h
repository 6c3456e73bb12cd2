#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace uqbench {

// VQA-style answer normalization: lowercase, ASCII punctuation removed,
// articles {a, an, the} removed, number words zero..ten (and "none")
// mapped to digits, whitespace trimmed and collapsed.
// Idempotent. Non-ASCII bytes pass through unchanged.
std::string normalize_answer(std::string_view text);

// Lowercased whitespace tokens with ASCII punctuation removed. Articles are
// kept, unlike normalize_answer.
std::vector<std::string> lexical_tokens(std::string_view text);

}  // namespace uqbench
