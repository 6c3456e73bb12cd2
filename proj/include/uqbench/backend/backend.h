#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/core/types.h"

namespace uqbench::backend {

struct BackendCapabilities {
  bool chosen_token_logprobs = false;
  bool full_step_distributions = false;
  bool sequence_scoring = false;
  bool image_input = false;

  bool operator==(const BackendCapabilities&) const = default;
};

void to_json(Json& j, const BackendCapabilities& c);
void from_json(const Json& j, BackendCapabilities& c);

// Whether the flags allow `e` to run at all. SemanticEntropy and the three
// black-box estimators need only sampled texts.
bool estimator_available(Estimator e, const BackendCapabilities& caps);

struct DecodingConfig {
  DecodingMode mode = DecodingMode::kGreedy;
  double temperature = 0.0;
  int num_samples = 1;
  int max_tokens = 64;
  double top_p = 1.0;

  static DecodingConfig greedy();
  // temperature 0.7, N = 10.
  static DecodingConfig sample();
  // Throws ParameterError when greedy has non-zero temperature or N < 1.
  void validate() const;

  bool operator==(const DecodingConfig&) const = default;
};

void to_json(Json& j, const DecodingConfig& c);
void from_json(const Json& j, DecodingConfig& c);

// Why a request is issued. Not part of the wire format; lets offline
// backends route canned answers.
enum class RequestPurpose { kAnswer, kPTrue, kRewrite };

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string text;
  // Encoded PNG/JPEG bytes attached to a user turn.
  std::optional<std::vector<std::uint8_t>> image;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 64;
  std::optional<std::uint64_t> seed;
  bool logprobs = false;
  int top_logprobs = 0;

  RequestPurpose purpose = RequestPurpose::kAnswer;
  // The question being answered or rewritten.
  std::string subject;
  int sample_index = 0;
};

struct ChatToken {
  std::string token;
  double logprob = 0.0;
  // Entropy of the full next-token distribution, when exposed.
  std::optional<double> entropy;
};

struct ChatResponse {
  std::string text;
  std::optional<std::vector<ChatToken>> tokens;
  bool refusal = false;
  std::string finish_reason;
};

// Model-inference boundary. Implementations must be safe for concurrent use.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendCapabilities capabilities() const = 0;

  // Throws TransportError on retryable network failures.
  virtual ChatResponse complete(const ChatRequest& request) = 0;

  // Per-token log p(continuation_t | continuation_<t) with no image and no
  // question in context. Throws CapabilityError when unsupported.
  virtual std::vector<double> score_prior(const std::string& continuation) = 0;
};

}  // namespace uqbench::backend
