#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace uqbench::text {

// QWERTY neighbours of a lowercase ASCII letter (diagonals included).
// Empty for anything else.
std::string_view qwerty_neighbors(char lower);

// Each ASCII letter is replaced with probability p by a uniformly chosen
// QWERTY neighbour, keeping its case. Length-preserving; digits, punctuation
// and non-ASCII bytes are never touched.
std::string apply_typos(std::string_view question, double p,
                        std::uint64_t seed);

// Whitespace tokens are deleted independently with probability p. The
// first token and a terminal "?" always survive.
std::string apply_dropwords(std::string_view question, double p,
                            std::uint64_t seed);

// Splits at "," ";" and the words "and" / "or", then swaps k uniformly
// chosen phrase pairs. Separators stay in place; the terminal "?" stays last.
// Inputs with fewer than two phrases come back unchanged.
std::string apply_shuffle(std::string_view question, int k, std::uint64_t seed);

// Phrase cores as apply_shuffle sees them (exposed for tests).
std::vector<std::string> split_phrases(std::string_view question);

// Presets: minor / calibrated / strong.
inline constexpr double kTyposMinor = 0.03;
inline constexpr double kTyposStrong = 0.15;
inline constexpr double kDropwordsMinor = 0.05;
inline constexpr double kDropwordsCalibrated = 0.15;
inline constexpr double kDropwordsStrong = 0.25;

}  // namespace uqbench::text
