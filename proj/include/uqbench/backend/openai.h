#pragma once

#include <chrono>
#include <string>

#include "uqbench/backend/backend.h"

namespace uqbench::backend {

struct OpenAiConfig {
  // e.g. "https://api.openai.com/v1"; chat requests go to
  // <base_url>/chat/completions.
  std::string base_url;
  std::string api_key;
  std::string model;
  BackendCapabilities capabilities{true, false, false, true};
  // Alternatives returned per step; entropies are computed from them only
  // when capabilities.full_step_distributions is set.
  int top_logprobs = 5;
  // Prior scoring goes to <base_url>/completions with echo=true. The prefix
  // is scored alone first so its tokens can be stripped.
  std::string prior_prefix = "\n";
  std::chrono::seconds timeout{120};

  // Reads UQBENCH_BASE_URL, UQBENCH_API_KEY, UQBENCH_MODEL. Throws
  // ParameterError when the base URL or model is missing.
  static OpenAiConfig from_env();
};

// OpenAI-compatible chat-completions client with base64 image attachments.
class OpenAiBackend : public Backend {
 public:
  explicit OpenAiBackend(OpenAiConfig config);

  BackendCapabilities capabilities() const override {
    return config_.capabilities;
  }
  ChatResponse complete(const ChatRequest& request) override;
  std::vector<double> score_prior(const std::string& continuation) override;

  // Wire encoding, exposed for tests.
  Json encode_request(const ChatRequest& request) const;
  ChatResponse decode_response(const Json& body) const;

 private:
  std::vector<double> echo_logprobs(const std::string& prompt);

  OpenAiConfig config_;
};

}  // namespace uqbench::backend
