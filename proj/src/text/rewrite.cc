#include "uqbench/text/rewrite.h"

#include <cctype>

#include "uqbench/core/errors.h"
#include "uqbench/core/prompts.h"

namespace uqbench::text {
namespace {

std::string tag_of(TextualKind kind) {
  return kind == TextualKind::kInv ? "INV" : "SBJ";
}

bool is_trim_char(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '"' || c == '\'' ||
         c == '`';
}

}  // namespace

RewritePrompt RewritePrompt::for_kind(TextualKind kind) {
  switch (kind) {
    case TextualKind::kInv:
      return RewritePrompt{std::string(inv_prompt())};
    case TextualKind::kSbj:
      return RewritePrompt{std::string(sbj_prompt())};
    default:
      throw ParameterError("only inv and sbj are prompt-based rewrites");
  }
}

std::string rewrite_user_text(const std::string& question, TextualKind kind) {
  return "Original: " + question + "\nRewritten (" + tag_of(kind) + "):";
}

std::string clean_rewrite(const std::string& raw) {
  std::string s = raw;
  for (const char* label : {"Rewritten (INV):", "Rewritten (SBJ):"}) {
    if (auto pos = s.find(label); pos != std::string::npos) {
      s = s.substr(pos + std::string(label).size());
    }
  }
  std::size_t a = 0;
  std::size_t b = s.size();
  // Quotes are stripped only as a matched outer layer around the question.
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  if (b - a >= 2 && is_trim_char(s[a]) && s[a] == s[b - 1]) {
    ++a;
    --b;
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  }
  return s.substr(a, b - a);
}

bool valid_rewrite(const std::string& source, const std::string& rewrite) {
  return !rewrite.empty() && rewrite != source && rewrite.back() == '?';
}

std::string rewrite_question(
    const std::string& question, TextualKind kind, backend::Backend& llm,
    const RewritePrompt& prompt,
    const std::optional<std::vector<std::uint8_t>>& image) {
  if (kind != TextualKind::kInv && kind != TextualKind::kSbj) {
    throw ParameterError("only inv and sbj are prompt-based rewrites");
  }
  backend::ChatRequest req;
  req.messages = {{"system", prompt.system_text, std::nullopt},
                  {"user", rewrite_user_text(question, kind), image}};
  req.temperature = prompt.temperature;
  req.max_tokens = 128;
  req.purpose = backend::RequestPurpose::kRewrite;
  req.subject = question;

  std::string last;
  const int attempts = 1 + std::max(0, prompt.max_retries);
  for (int i = 0; i < attempts; ++i) {
    last = llm.complete(req).text;
    const std::string cleaned = clean_rewrite(last);
    if (valid_rewrite(question, cleaned)) return cleaned;
  }
  throw RewriteFailedError("rewrite (" + tag_of(kind) + ") failed validation " +
                               std::to_string(attempts) + " times",
                           last);
}

std::string rewrite_question(
    const std::string& question, TextualKind kind, backend::Backend& llm,
    const std::optional<std::vector<std::uint8_t>>& image) {
  return rewrite_question(question, kind, llm, RewritePrompt::for_kind(kind),
                          image);
}

}  // namespace uqbench::text
