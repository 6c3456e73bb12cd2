#include "uqbench/text/lexical.h"

#include <array>
#include <cctype>
#include <utility>

#include "uqbench/core/errors.h"
#include "uqbench/core/random.h"

namespace uqbench::text {
namespace {

constexpr std::array<std::string_view, 26> kQwerty = {
    "qwsz",     // a
    "vghn",     // b
    "xdfv",     // c
    "wersfxc",  // d
    "wrsdf",    // e
    "ertdgcv",  // f
    "rtyfhvb",  // g
    "tyugjbn",  // h
    "uojkl",    // i
    "yuihknm",  // j
    "uiojlm",   // k
    "iopk",     // l
    "njk",      // m
    "bhjm",     // n
    "ipkl",     // o
    "ol",       // p
    "was",      // q
    "etdfg",    // r
    "qweadzx",  // s
    "ryfgh",    // t
    "yihjk",    // u
    "cfgb",     // v
    "qeasd",    // w
    "zsdc",     // x
    "tughj",    // y
    "asx",      // z
};

void check_probability(double p, const char* op) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string(op) + " probability must be in [0, 1]");
  }
}

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Splits off a trailing "?" (after trailing whitespace is ignored).
struct Body {
  std::string_view text;
  std::string_view tail;  // "?" or "" plus any whitespace around it
  bool has_question_mark = false;
};

Body split_terminal_mark(std::string_view q) {
  std::size_t end = q.size();
  while (end > 0 && is_space(q[end - 1])) --end;
  if (end > 0 && q[end - 1] == '?') {
    std::size_t start = end - 1;
    while (start > 0 && is_space(q[start - 1])) --start;
    return {q.substr(0, start), q.substr(start), true};
  }
  return {q, {}, false};
}

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool equals_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != b[i]) return false;
  }
  return true;
}

// Body split into alternating glue and phrase-core pieces:
// glue[0] core[0] glue[1] core[1] ... core[n-1] glue[n].
struct Phrases {
  std::vector<std::string> glue;
  std::vector<std::string> cores;
};

Phrases phrase_pieces(std::string_view body) {
  // Separator spans [begin, end) including surrounding whitespace.
  std::vector<std::pair<std::size_t, std::size_t>> seps;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == ',' || c == ';') {
      seps.emplace_back(i, i + 1);
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) &&
        (i == 0 || !std::isalnum(static_cast<unsigned char>(body[i - 1])))) {
      std::size_t j = i;
      while (j < body.size() && std::isalnum(static_cast<unsigned char>(body[j]))) ++j;
      auto word = body.substr(i, j - i);
      if (equals_ci(word, "and") || equals_ci(word, "or")) seps.emplace_back(i, j);
      i = j;
      continue;
    }
    ++i;
  }

  Phrases out;
  std::size_t cursor = 0;
  std::string pending_glue;
  auto push_segment = [&](std::size_t begin, std::size_t end) {
    auto seg = body.substr(begin, end - begin);
    std::size_t a = 0;
    std::size_t b = seg.size();
    while (a < b && is_space(seg[a])) ++a;
    while (b > a && is_space(seg[b - 1])) --b;
    pending_glue += std::string(seg.substr(0, a));
    out.glue.push_back(pending_glue);
    out.cores.emplace_back(seg.substr(a, b - a));
    pending_glue = std::string(seg.substr(b));
  };
  for (const auto& [sb, se] : seps) {
    push_segment(cursor, sb);
    pending_glue += std::string(body.substr(sb, se - sb));
    cursor = se;
  }
  push_segment(cursor, body.size());
  out.glue.push_back(pending_glue);
  return out;
}

}  // namespace

std::string_view qwerty_neighbors(char lower) {
  if (lower < 'a' || lower > 'z') return {};
  return kQwerty[static_cast<std::size_t>(lower - 'a')];
}

std::string apply_typos(std::string_view question, double p,
                        std::uint64_t seed) {
  check_probability(p, "typos");
  std::string out(question);
  if (p == 0.0) return out;
  Rng rng(seed);
  for (auto& ch : out) {
    const auto uc = static_cast<unsigned char>(ch);
    if (uc >= 0x80 || !std::isalpha(uc)) continue;
    if (!rng.bernoulli(p)) continue;
    const bool upper = std::isupper(uc) != 0;
    auto neighbors = qwerty_neighbors(static_cast<char>(std::tolower(uc)));
    char repl = neighbors[rng.index(neighbors.size())];
    ch = upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(repl)))
               : repl;
  }
  return out;
}

std::string apply_dropwords(std::string_view question, double p,
                            std::uint64_t seed) {
  check_probability(p, "dropwords");
  if (p == 0.0) return std::string(question);
  const Body body = split_terminal_mark(question);
  auto tokens = whitespace_tokens(body.text);
  if (tokens.size() <= 1) return std::string(question);

  Rng rng(seed);
  std::vector<std::string_view> kept = {tokens.front()};
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (!rng.bernoulli(p)) kept.push_back(tokens[i]);
  }
  if (kept.size() == tokens.size()) return std::string(question);

  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out.push_back(' ');
    out += kept[i];
  }
  if (body.has_question_mark) {
    // Keep "word ?" vs "word?" as in the source.
    out += (body.tail.size() > 1 && is_space(body.tail.front())) ? " ?" : "?";
  }
  return out;
}

std::vector<std::string> split_phrases(std::string_view question) {
  return phrase_pieces(split_terminal_mark(question).text).cores;
}

std::string apply_shuffle(std::string_view question, int k, std::uint64_t seed) {
  if (k < 0) throw ParameterError("shuffle count k must be >= 0");
  if (k == 0) return std::string(question);
  const Body body = split_terminal_mark(question);
  Phrases pieces = phrase_pieces(body.text);

  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < pieces.cores.size(); ++i) {
    if (!pieces.cores[i].empty()) movable.push_back(i);
  }
  if (movable.size() < 2) return std::string(question);

  Rng rng(seed);
  const std::uint64_t n = movable.size();
  const std::uint64_t pairs = n * (n - 1) / 2;
  for (int s = 0; s < k; ++s) {
    // Index into the upper triangle of (i < j) pairs.
    std::uint64_t r = rng.index(pairs);
    std::uint64_t i = 0;
    while (r >= n - 1 - i) {
      r -= n - 1 - i;
      ++i;
    }
    const std::uint64_t j = i + 1 + r;
    std::swap(pieces.cores[movable[i]], pieces.cores[movable[j]]);
  }

  std::string out;
  for (std::size_t i = 0; i < pieces.cores.size(); ++i) {
    out += pieces.glue[i];
    out += pieces.cores[i];
  }
  out += pieces.glue.back();
  out += body.tail;
  return out;
}

}  // namespace uqbench::text
