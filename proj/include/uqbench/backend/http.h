#pragma once

#include <chrono>
#include <map>
#include <string>

#include "uqbench/core/types.h"

namespace uqbench::backend {

struct HttpResult {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to an absolute http(s) URL. Throws TransportError when
// no response arrives.
HttpResult post_json(const std::string& url, const Json& body,
                     const std::map<std::string, std::string>& headers = {},
                     std::chrono::seconds timeout = std::chrono::seconds(120));

// POST + status check + parse. 429 and 5xx raise TransportError (retryable);
// other non-2xx raise Error.
Json post_json_checked(const std::string& url, const Json& body,
                       const std::map<std::string, std::string>& headers = {},
                       std::chrono::seconds timeout = std::chrono::seconds(120));

}  // namespace uqbench::backend
