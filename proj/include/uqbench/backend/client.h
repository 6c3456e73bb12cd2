#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "uqbench/backend/backend.h"

namespace uqbench::backend {

// Exponential backoff for TransportError.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
};

// Resolves a VariantRecord::image_ref to encoded image bytes.
using ImageLoader =
    std::function<std::vector<std::uint8_t>(const std::string& image_ref)>;

inline constexpr std::string_view kPTrueSystemPrompt =
    "Answer with exactly one word, True or False.";
std::string ptrue_user_text(const std::string& question,
                            const std::string& answer);

// p("True") from the first decision token: exp(lp) for "True", and
// 1 - exp(lp) for "False" (binary renormalization). nullopt for any other
// token. Matching ignores surrounding whitespace and case.
std::optional<double> ptrue_from_decision(const std::string& token,
                                          double logprob);

// Decorator adding an in-flight limit and TransportError retries with
// exponential backoff to every call of the wrapped backend.
class GuardedBackend : public Backend {
 public:
  GuardedBackend(Backend& inner, RetryPolicy retry = {}, int max_in_flight = 8);

  BackendCapabilities capabilities() const override {
    return inner_.capabilities();
  }
  ChatResponse complete(const ChatRequest& request) override;
  std::vector<double> score_prior(const std::string& continuation) override;

 private:
  template <typename F>
  auto with_retry(F&& fn) -> decltype(fn());

  Backend& inner_;
  RetryPolicy retry_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

// Issues generation, PTrue and prior-scoring requests through a
// GuardedBackend. Safe for concurrent use.
class VlmClient {
 public:
  VlmClient(Backend& backend, ImageLoader loader, RetryPolicy retry = {},
            int max_in_flight = 8);

  const BackendCapabilities& capabilities() const { return caps_; }

  // Greedy: one record. Sample: cfg.num_samples records, sample_index
  // 0..N-1. Per-sample request seeds derive from (seed, variant_id, index).
  std::vector<GenerationRecord> generate(const VariantRecord& variant,
                                         const DecodingConfig& cfg,
                                         std::uint64_t seed = 0);

  // Throws CapabilityError without chosen-token logprobs and
  // ElicitationError when no True/False decision token comes back.
  ElicitationRecord elicit_ptrue(const VariantRecord& variant,
                                 const std::string& answer);

  // Throws CapabilityError without sequence scoring; DataError when the
  // backend's token count differs from generation.token_logprobs.
  std::vector<double> score_unconditional(const GenerationRecord& generation);

 private:
  GuardedBackend backend_;
  ImageLoader loader_;
  BackendCapabilities caps_;
};

}  // namespace uqbench::backend
