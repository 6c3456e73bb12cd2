#include "uqbench/backend/client.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <thread>

#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"

namespace uqbench::backend {
namespace {

constexpr int kPTrueAttempts = 3;

std::string trim_lower(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  std::string out = s.substr(a, b - a);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string ptrue_user_text(const std::string& question,
                            const std::string& answer) {
  return "Question: " + question + "\nProposed answer: " + answer +
         "\nIs the proposed answer true?";
}

std::optional<double> ptrue_from_decision(const std::string& token,
                                          double logprob) {
  const auto t = trim_lower(token);
  const double p = std::exp(std::min(logprob, 0.0));
  if (t == "true") return p;
  if (t == "false") return 1.0 - p;
  return std::nullopt;
}

GuardedBackend::GuardedBackend(Backend& inner, RetryPolicy retry,
                               int max_in_flight)
    : inner_(inner),
      retry_(retry),
      in_flight_(std::make_unique<std::counting_semaphore<1024>>(
          std::clamp(max_in_flight, 1, 1024))) {}

template <typename F>
auto GuardedBackend::with_retry(F&& fn) -> decltype(fn()) {
  auto delay = retry_.base_delay;
  for (int attempt = 1;; ++attempt) {
    in_flight_->acquire();
    try {
      auto result = fn();
      in_flight_->release();
      return result;
    } catch (const TransportError&) {
      in_flight_->release();
      if (attempt >= retry_.max_attempts) throw;
    } catch (...) {
      in_flight_->release();
      throw;
    }
    std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(
        static_cast<long>(delay.count() * retry_.multiplier));
  }
}

ChatResponse GuardedBackend::complete(const ChatRequest& request) {
  return with_retry([&] { return inner_.complete(request); });
}

std::vector<double> GuardedBackend::score_prior(const std::string& continuation) {
  return with_retry([&] { return inner_.score_prior(continuation); });
}

VlmClient::VlmClient(Backend& backend, ImageLoader loader, RetryPolicy retry,
                     int max_in_flight)
    : backend_(backend, retry, max_in_flight),
      loader_(std::move(loader)),
      caps_(backend.capabilities()) {}

std::vector<GenerationRecord> VlmClient::generate(const VariantRecord& variant,
                                                  const DecodingConfig& cfg,
                                                  std::uint64_t seed) {
  cfg.validate();
  ChatMessage user{"user", variant.question, std::nullopt};
  if (caps_.image_input && !variant.image_ref.empty()) {
    user.image = loader_(variant.image_ref);
  }

  const int n = cfg.mode == DecodingMode::kGreedy ? 1 : cfg.num_samples;
  std::vector<GenerationRecord> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ChatRequest req;
    req.messages = {user};
    req.temperature = cfg.mode == DecodingMode::kGreedy ? 0.0 : cfg.temperature;
    req.top_p = cfg.top_p;
    req.max_tokens = cfg.max_tokens;
    req.seed = derive_seed(seed, variant.variant_id,
                           std::string(decoding_mode_name(cfg.mode)) + "/" +
                               std::to_string(i));
    req.logprobs = caps_.chosen_token_logprobs;
    req.purpose = RequestPurpose::kAnswer;
    req.subject = variant.question;
    req.sample_index = i;

    ChatResponse resp = backend_.complete(req);
    GenerationRecord g;
    g.instance_id = variant.instance_id;
    g.variant_id = variant.variant_id;
    g.mode = cfg.mode;
    g.text = resp.text;
    g.sample_index = i;
    g.refusal = resp.refusal;
    if (caps_.chosen_token_logprobs && resp.tokens) {
      std::vector<double> lps;
      lps.reserve(resp.tokens->size());
      for (const auto& t : *resp.tokens) lps.push_back(t.logprob);
      g.token_logprobs = std::move(lps);
      const bool all_entropies =
          std::all_of(resp.tokens->begin(), resp.tokens->end(),
                      [](const ChatToken& t) { return t.entropy.has_value(); });
      if (caps_.full_step_distributions && all_entropies) {
        std::vector<double> ents;
        for (const auto& t : *resp.tokens) ents.push_back(*t.entropy);
        g.step_entropies = std::move(ents);
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

ElicitationRecord VlmClient::elicit_ptrue(const VariantRecord& variant,
                                          const std::string& answer) {
  if (!caps_.chosen_token_logprobs) {
    throw CapabilityError("PTrue needs chosen-token logprobs");
  }
  ChatMessage user{"user", ptrue_user_text(variant.question, answer),
                   std::nullopt};
  if (caps_.image_input && !variant.image_ref.empty()) {
    user.image = loader_(variant.image_ref);
  }
  ChatRequest req;
  req.messages = {{"system", std::string(kPTrueSystemPrompt), std::nullopt},
                  user};
  req.temperature = 0.0;
  req.max_tokens = 1;
  req.logprobs = true;
  req.purpose = RequestPurpose::kPTrue;
  req.subject = variant.question;

  std::string last;
  for (int attempt = 0; attempt < kPTrueAttempts; ++attempt) {
    ChatResponse resp = backend_.complete(req);
    if (!resp.tokens || resp.tokens->empty()) {
      last = resp.text;
      continue;
    }
    const ChatToken& first = resp.tokens->front();
    if (auto p = ptrue_from_decision(first.token, first.logprob)) {
      return ElicitationRecord{variant.instance_id, variant.variant_id, answer,
                               first.token,        first.logprob,      *p};
    }
    last = first.token;
  }
  throw ElicitationError("PTrue elicitation produced '" + last +
                         "' instead of True/False");
}

std::vector<double> VlmClient::score_unconditional(
    const GenerationRecord& generation) {
  if (!caps_.sequence_scoring) {
    throw CapabilityError("backend does not support sequence scoring");
  }
  if (!generation.token_logprobs) {
    throw DataError("generation has no token logprobs to align with");
  }
  auto prior = backend_.score_prior(generation.text);
  if (prior.size() != generation.token_logprobs->size()) {
    throw DataError("prior scoring returned " + std::to_string(prior.size()) +
                    " tokens, generation has " +
                    std::to_string(generation.token_logprobs->size()));
  }
  return prior;
}

}  // namespace uqbench::backend
