#pragma once

#include <string_view>

namespace uqbench {

// Versioned rewrite prompts, compiled in from assets/prompts/*.v1.txt.
inline constexpr std::string_view kPromptVersion = "v1";

std::string_view inv_prompt();
std::string_view sbj_prompt();
std::string_view amb_ive_prompt();

}  // namespace uqbench
