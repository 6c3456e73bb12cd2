#include "uqbench/backend/mock.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"
#include "uqbench/core/random.h"

namespace uqbench::backend {
namespace {

std::uint64_t seed_from(const std::string& material) {
  const auto hex = sha256_hex(material);
  return std::stoull(hex.substr(0, 16), nullptr, 16);
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string strip_question_mark(std::string s) {
  while (!s.empty() && (s.back() == '?' || std::isspace(static_cast<unsigned char>(s.back())))) {
    s.pop_back();
  }
  return s;
}

const std::vector<std::string> kDefaultPool = {"yes", "no", "red",  "blue",
                                               "two", "three", "cube", "sphere"};

}  // namespace

MockBackend::MockBackend(Json fixture) : fixture_(std::move(fixture)) {
  caps_ = fixture_.value("capabilities",
                         Json{{"chosen_token_logprobs", true},
                              {"full_step_distributions", true},
                              {"sequence_scoring", true},
                              {"image_input", true}})
              .get<BackendCapabilities>();
  pool_ = fixture_.value("answers", kDefaultPool);
  if (pool_.empty()) throw DataError("mock fixture answer pool is empty");
  prior_equals_conditional_ = fixture_.value("prior_equals_conditional", false);
  if (!fixture_.contains("entries")) fixture_["entries"] = Json::object();
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
  try {
    return MockBackend(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string MockBackend::question_key(const std::string& question) {
  return sha256_hex(question);
}

int MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

const Json* MockBackend::entry_for(const std::string& question) const {
  const auto& entries = fixture_.at("entries");
  auto it = entries.find(question_key(question));
  return it == entries.end() ? nullptr : &*it;
}

ChatResponse MockBackend::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  const Json* entry = entry_for(request.subject);
  switch (request.purpose) {
    case RequestPurpose::kAnswer:
      return answer(request, entry);
    case RequestPurpose::kPTrue:
      return ptrue(request, entry);
    case RequestPurpose::kRewrite:
      return rewrite(request, entry);
  }
  return {};
}

ChatResponse MockBackend::from_canned(const Json& canned) {
  ChatResponse r;
  r.text = canned.at("text").get<std::string>();
  r.finish_reason = "stop";
  if (caps_.chosen_token_logprobs && canned.contains("tokens")) {
    std::vector<ChatToken> toks;
    std::vector<double> lps;
    for (const auto& t : canned.at("tokens")) {
      ChatToken tok{t.at("token").get<std::string>(), t.at("logprob").get<double>(),
                    std::nullopt};
      if (caps_.full_step_distributions && t.contains("entropy")) {
        tok.entropy = t.at("entropy").get<double>();
      }
      lps.push_back(tok.logprob);
      toks.push_back(std::move(tok));
    }
    r.tokens = std::move(toks);
    std::lock_guard lock(mu_);
    conditional_by_text_[r.text] = lps;
    if (canned.contains("prior_logprobs")) {
      prior_by_text_[r.text] = canned.at("prior_logprobs").get<std::vector<double>>();
    }
  }
  return r;
}

ChatResponse MockBackend::answer(const ChatRequest& request, const Json* entry) {
  const bool greedy = request.temperature == 0.0;
  if (entry) {
    if (entry->value("refuse", false)) {
      ChatResponse r;
      r.text = "I cannot answer that.";
      r.refusal = true;
      r.finish_reason = "content_filter";
      return r;
    }
    if (greedy && entry->contains("greedy")) return from_canned(entry->at("greedy"));
    if (!greedy && entry->contains("samples") && !entry->at("samples").empty()) {
      const auto& samples = entry->at("samples");
      const std::size_t idx =
          static_cast<std::size_t>(request.sample_index) % samples.size();
      return from_canned(samples.at(idx));
    }
  }

  std::vector<std::string> pool = pool_;
  if (entry && entry->contains("answers")) {
    pool = entry->at("answers").get<std::vector<std::string>>();
  }
  std::string image_digest;
  for (const auto& m : request.messages) {
    if (m.image) image_digest = sha256_hex(std::span<const std::uint8_t>(*m.image));
  }
  // Greedy ignores the request seed so that every greedy call agrees.
  std::string base = request.subject + '\0' + image_digest;
  Rng pick(seed_from(base + "|greedy"));
  const std::size_t greedy_idx = pick.index(pool.size());
  std::size_t idx = greedy_idx;
  Rng rng(seed_from(base + '\0' + std::to_string(request.temperature) + '\0' +
                    std::to_string(request.seed.value_or(0))));
  if (!greedy && rng.uniform() >= 0.6) idx = rng.index(pool.size());

  ChatResponse r;
  r.text = pool[idx];
  r.finish_reason = "stop";
  if (caps_.chosen_token_logprobs) {
    // With prior_equals_conditional the logprobs depend on the text alone so
    // score_prior can reproduce them.
    const std::string material =
        prior_equals_conditional_
            ? "cond|" + r.text
            : base + '\0' + r.text + '\0' +
                  std::to_string(greedy ? 0 : request.seed.value_or(0));
    std::vector<ChatToken> toks;
    Rng tok_rng(seed_from(material));
    for (const auto& w : split_words(r.text)) {
      ChatToken t{w, -(0.02 + 2.0 * tok_rng.uniform()), std::nullopt};
      const double ent = 0.05 + 3.0 * tok_rng.uniform();
      if (caps_.full_step_distributions) t.entropy = ent;
      toks.push_back(std::move(t));
    }
    r.tokens = std::move(toks);
  }
  return r;
}

ChatResponse MockBackend::ptrue(const ChatRequest& request,
                                const Json* entry) const {
  ChatResponse r;
  r.finish_reason = "stop";
  std::string token;
  double logprob = 0.0;
  if (entry && entry->contains("ptrue")) {
    token = entry->at("ptrue").at("token").get<std::string>();
    logprob = entry->at("ptrue").at("logprob").get<double>();
  } else {
    std::string material = "ptrue";
    for (const auto& m : request.messages) {
      material += '\0' + m.text;
      if (m.image) material += sha256_hex(std::span<const std::uint8_t>(*m.image));
    }
    Rng rng(seed_from(material));
    token = rng.uniform() < 0.7 ? "True" : "False";
    logprob = -(0.01 + 1.5 * rng.uniform());
  }
  r.text = token;
  if (caps_.chosen_token_logprobs) r.tokens = std::vector<ChatToken>{{token, logprob, std::nullopt}};
  return r;
}

ChatResponse MockBackend::rewrite(const ChatRequest& request,
                                  const Json* entry) const {
  ChatResponse r;
  r.finish_reason = "stop";
  // The rewrite kind is the last word of the system prompt's "Goal" line
  // for INV/SBJ; the cross prompt is recognized by its JSON schema.
  std::string system;
  for (const auto& m : request.messages) {
    if (m.role == "system") system = m.text;
  }
  std::string kind = "cross";
  if (system.find("into INV form") != std::string::npos) kind = "inv";
  if (system.find("into SBJ form") != std::string::npos) kind = "sbj";

  if (entry && entry->contains("rewrites") && entry->at("rewrites").contains(kind)) {
    r.text = entry->at("rewrites").at(kind).get<std::string>();
    return r;
  }
  const std::string q = request.subject;
  const std::string body = lower_first(strip_question_mark(q));
  if (kind == "inv") {
    r.text = "Without looking at anything, " + body + "?";
  } else if (kind == "sbj") {
    r.text = "Do you honestly think " + body + "?";
  } else {
    Json out{{"analysis", "synthetic analysis of: " + q},
             {"AMB",
              {{"variant_question", "Roughly speaking, " + body + "?"},
               {"plausible_answers", {"first candidate", "second candidate"}}}},
             {"IVE",
              {{"variant_question", "What lies just outside the frame, where " + body + "?"},
               {"reason_unanswerable", "Out of Frame"}}}};
    r.text = out.dump();
  }
  return r;
}

std::vector<double> MockBackend::score_prior(const std::string& continuation) {
  if (!caps_.sequence_scoring) {
    throw CapabilityError("mock backend configured without sequence scoring");
  }
  {
    std::lock_guard lock(mu_);
    if (prior_equals_conditional_) {
      if (auto it = conditional_by_text_.find(continuation);
          it != conditional_by_text_.end()) {
        return it->second;
      }
    } else if (auto it = prior_by_text_.find(continuation);
               it != prior_by_text_.end()) {
      return it->second;
    }
  }
  if (prior_equals_conditional_) {
    Rng rng(seed_from("cond|" + continuation));
    std::vector<double> out;
    for (std::size_t i = 0; i < split_words(continuation).size(); ++i) {
      out.push_back(-(0.02 + 2.0 * rng.uniform()));
      rng.uniform();
    }
    return out;
  }
  Rng rng(seed_from("prior|" + continuation));
  std::vector<double> out;
  for (std::size_t i = 0; i < split_words(continuation).size(); ++i) {
    out.push_back(-(0.1 + 3.0 * rng.uniform()));
  }
  return out;
}

}  // namespace uqbench::backend
