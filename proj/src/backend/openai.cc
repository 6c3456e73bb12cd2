#include "uqbench/backend/openai.h"

#include <cmath>
#include <cstdlib>

#include "uqbench/backend/http.h"
#include "uqbench/core/digest.h"
#include "uqbench/core/errors.h"

namespace uqbench::backend {
namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

std::string mime_of(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) return "image/jpeg";
  return "image/png";
}

std::string trim_slash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

}  // namespace

OpenAiConfig OpenAiConfig::from_env() {
  OpenAiConfig c;
  c.base_url = env_or("UQBENCH_BASE_URL", "");
  c.api_key = env_or("UQBENCH_API_KEY", "");
  c.model = env_or("UQBENCH_MODEL", "");
  if (c.base_url.empty()) throw ParameterError("UQBENCH_BASE_URL is not set");
  if (c.model.empty()) throw ParameterError("UQBENCH_MODEL is not set");
  return c;
}

OpenAiBackend::OpenAiBackend(OpenAiConfig config) : config_(std::move(config)) {
  config_.base_url = trim_slash(config_.base_url);
}

Json OpenAiBackend::encode_request(const ChatRequest& request) const {
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    if (!m.image) {
      messages.push_back({{"role", m.role}, {"content", m.text}});
      continue;
    }
    Json content = Json::array();
    content.push_back({{"type", "text"}, {"text", m.text}});
    const std::string url = "data:" + mime_of(*m.image) + ";base64," +
                            base64_encode(std::span<const std::uint8_t>(*m.image));
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  Json body{{"model", config_.model},
            {"messages", messages},
            {"temperature", request.temperature},
            {"top_p", request.top_p},
            {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  if (request.logprobs) {
    body["logprobs"] = true;
    const int top = std::max(request.top_logprobs, config_.top_logprobs);
    if (top > 0) body["top_logprobs"] = top;
  }
  return body;
}

ChatResponse OpenAiBackend::decode_response(const Json& body) const {
  const auto& choices = body.at("choices");
  if (choices.empty()) throw DataError("chat response without choices");
  const auto& choice = choices.at(0);
  const auto& message = choice.at("message");

  ChatResponse r;
  if (auto c = message.find("content"); c != message.end() && c->is_string()) {
    r.text = c->get<std::string>();
  }
  if (auto ref = message.find("refusal"); ref != message.end() && ref->is_string()) {
    r.refusal = true;
    if (r.text.empty()) r.text = ref->get<std::string>();
  }
  r.finish_reason = choice.value("finish_reason", std::string());
  if (r.finish_reason == "content_filter") r.refusal = true;

  auto lp = choice.find("logprobs");
  if (lp != choice.end() && lp->is_object() && lp->contains("content") &&
      lp->at("content").is_array()) {
    std::vector<ChatToken> toks;
    for (const auto& t : lp->at("content")) {
      ChatToken tok{t.at("token").get<std::string>(),
                    t.at("logprob").get<double>(), std::nullopt};
      if (config_.capabilities.full_step_distributions && t.contains("top_logprobs")) {
        double h = 0.0;
        for (const auto& alt : t.at("top_logprobs")) {
          const double l = alt.at("logprob").get<double>();
          h -= std::exp(l) * l;
        }
        tok.entropy = h;
      }
      toks.push_back(std::move(tok));
    }
    r.tokens = std::move(toks);
  }
  return r;
}

ChatResponse OpenAiBackend::complete(const ChatRequest& request) {
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  auto res = post_json(config_.base_url + "/chat/completions",
                       encode_request(request), headers, config_.timeout);
  if (res.status == 429 || res.status >= 500) {
    throw TransportError("chat completion returned HTTP " + std::to_string(res.status));
  }
  if (res.status == 400 &&
      res.body.find("content_policy_violation") != std::string::npos) {
    ChatResponse r;
    r.refusal = true;
    r.finish_reason = "content_filter";
    return r;
  }
  if (res.status < 200 || res.status >= 300) {
    throw Error("chat completion returned HTTP " + std::to_string(res.status) +
                ": " + res.body.substr(0, 500));
  }
  try {
    return decode_response(Json::parse(res.body));
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed chat completion: ") + e.what());
  }
}

std::vector<double> OpenAiBackend::echo_logprobs(const std::string& prompt) {
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  Json body{{"model", config_.model}, {"prompt", prompt}, {"max_tokens", 0},
            {"echo", true},           {"logprobs", 0},      {"temperature", 0.0}};
  Json res = post_json_checked(config_.base_url + "/completions", body, headers,
                               config_.timeout);
  std::vector<double> out;
  for (const auto& v : res.at("choices").at(0).at("logprobs").at("token_logprobs")) {
    out.push_back(v.is_null() ? std::nan("") : v.get<double>());
  }
  return out;
}

std::vector<double> OpenAiBackend::score_prior(const std::string& continuation) {
  if (!config_.capabilities.sequence_scoring) {
    throw CapabilityError("endpoint configured without sequence scoring");
  }
  std::size_t skip = 0;
  if (!config_.prior_prefix.empty()) skip = echo_logprobs(config_.prior_prefix).size();
  auto all = echo_logprobs(config_.prior_prefix + continuation);
  if (all.size() < skip) throw DataError("prior scoring lost prefix tokens");
  std::vector<double> out(all.begin() + static_cast<long>(skip), all.end());
  for (double v : out) {
    if (std::isnan(v)) throw DataError("prior scoring returned a null logprob");
  }
  return out;
}

}  // namespace uqbench::backend
