#include "uqbench/core/normalize.h"

#include <cctype>
#include <sstream>

namespace uqbench {

namespace {

std::string fold(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::ispunct(c)) continue;
    if (c < 0x80 && std::isspace(c)) {
      cleaned.push_back(' ');
      continue;
    }
    cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
  }
  return cleaned;
}

std::string_view number_word(const std::string& word) {
  static constexpr std::string_view kWords[] = {
      "zero", "one", "two", "three", "four", "five",
      "six", "seven", "eight", "nine", "ten"};
  static constexpr std::string_view kDigits[] = {
      "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10"};
  if (word == "none") return "0";
  for (std::size_t i = 0; i < std::size(kWords); ++i) {
    if (word == kWords[i]) return kDigits[i];
  }
  return word;
}

}  // namespace

std::vector<std::string> lexical_tokens(std::string_view text) {
  std::istringstream in(fold(text));
  std::vector<std::string> out;
  std::string word;
  while (in >> word) out.push_back(std::move(word));
  return out;
}

std::string normalize_answer(std::string_view text) {
  std::istringstream in(fold(text));
  std::string word;
  std::string out;
  while (in >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += number_word(word);
  }
  return out;
}

}  // namespace uqbench
