#pragma once

#include <filesystem>
#include <memory>

#include "uqbench/backend/backend.h"

namespace uqbench::backend {

// Backend from a config object:
//   {"kind": "mock", "fixture": "<path>"}           fixture optional
//   {"kind": "openai", "base_url", "model", "api_key_env", "capabilities",
//    "top_logprobs", "timeout_s"}                    unset fields from env
// Relative paths resolve against `base_dir`.
std::unique_ptr<Backend> make_backend(const Json& config,
                                      const std::filesystem::path& base_dir);

}  // namespace uqbench::backend
