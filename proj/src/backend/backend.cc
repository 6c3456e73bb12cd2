#include "uqbench/backend/backend.h"

#include "uqbench/core/errors.h"

namespace uqbench::backend {

void to_json(Json& j, const BackendCapabilities& c) {
  j = Json{{"chosen_token_logprobs", c.chosen_token_logprobs},
           {"full_step_distributions", c.full_step_distributions},
           {"sequence_scoring", c.sequence_scoring},
           {"image_input", c.image_input}};
}

void from_json(const Json& j, BackendCapabilities& c) {
  c.chosen_token_logprobs = j.value("chosen_token_logprobs", false);
  c.full_step_distributions = j.value("full_step_distributions", false);
  c.sequence_scoring = j.value("sequence_scoring", false);
  c.image_input = j.value("image_input", false);
}

bool estimator_available(Estimator e, const BackendCapabilities& caps) {
  switch (e) {
    case Estimator::kMsp:
    case Estimator::kPerplexity:
    case Estimator::kPTrue:
      return caps.chosen_token_logprobs;
    case Estimator::kMeanTokenEntropy:
      return caps.full_step_distributions;
    case Estimator::kPmi:
      return caps.sequence_scoring && caps.chosen_token_logprobs;
    case Estimator::kSemanticEntropy:
    case Estimator::kLexSim:
    case Estimator::kDegMat:
    case Estimator::kLuq:
      return true;
  }
  return false;
}

DecodingConfig DecodingConfig::greedy() {
  return DecodingConfig{DecodingMode::kGreedy, 0.0, 1, 64, 1.0};
}

DecodingConfig DecodingConfig::sample() {
  return DecodingConfig{DecodingMode::kSample, 0.7, 10, 64, 1.0};
}

void DecodingConfig::validate() const {
  if (mode == DecodingMode::kGreedy && temperature != 0.0) {
    throw ParameterError("greedy decoding requires temperature 0");
  }
  if (num_samples < 1) throw ParameterError("num_samples must be >= 1");
  if (max_tokens < 1) throw ParameterError("max_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw ParameterError("temperature must be >= 0");
}

void to_json(Json& j, const DecodingConfig& c) {
  j = Json{{"mode", decoding_mode_name(c.mode)},
           {"temperature", c.temperature},
           {"num_samples", c.num_samples},
           {"max_tokens", c.max_tokens},
           {"top_p", c.top_p}};
}

void from_json(const Json& j, DecodingConfig& c) {
  const auto mode = j.value("mode", std::string("greedy"));
  if (mode == "greedy") {
    c = DecodingConfig::greedy();
  } else if (mode == "sample") {
    c = DecodingConfig::sample();
  } else {
    throw ParameterError("unknown decoding mode '" + mode + "'");
  }
  c.temperature = j.value("temperature", c.temperature);
  c.num_samples = j.value("num_samples", c.num_samples);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.top_p = j.value("top_p", c.top_p);
  c.validate();
}

}  // namespace uqbench::backend
