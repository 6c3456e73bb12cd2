#include "uqbench/backend/factory.h"

#include <cstdlib>

#include "uqbench/backend/mock.h"
#include "uqbench/backend/openai.h"
#include "uqbench/core/errors.h"
#include "uqbench/core/jsonl.h"

namespace uqbench::backend {

std::unique_ptr<Backend> make_backend(const Json& config,
                                      const std::filesystem::path& base_dir) {
  const std::string kind = config.value("kind", std::string("mock"));
  if (kind == "mock") {
    if (!config.contains("fixture")) return std::make_unique<MockBackend>(Json::object());
    const auto path = base_dir / config.at("fixture").get<std::string>();
    try {
      return std::make_unique<MockBackend>(Json::parse(read_file(path)));
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  if (kind == "openai") {
    OpenAiConfig c;
    auto env = [](const std::string& name) {
      const char* v = std::getenv(name.c_str());
      return v ? std::string(v) : std::string();
    };
    c.base_url = config.value("base_url", env("UQBENCH_BASE_URL"));
    c.model = config.value("model", env("UQBENCH_MODEL"));
    c.api_key = env(config.value("api_key_env", std::string("UQBENCH_API_KEY")));
    if (c.base_url.empty()) throw ParameterError("openai backend without base_url");
    if (c.model.empty()) throw ParameterError("openai backend without model");
    if (config.contains("capabilities")) {
      c.capabilities = config.at("capabilities").get<BackendCapabilities>();
    }
    c.top_logprobs = config.value("top_logprobs", c.top_logprobs);
    c.timeout = std::chrono::seconds(config.value("timeout_s", 120));
    return std::make_unique<OpenAiBackend>(std::move(c));
  }
  throw ParameterError("unknown backend kind: " + kind);
}

}  // namespace uqbench::backend
