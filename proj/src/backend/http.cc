#include "uqbench/backend/http.h"

#include <httplib.h>

#include "uqbench/core/errors.h"

namespace uqbench::backend {
namespace {

// "http://host:8080/v1/chat" -> ("http://host:8080", "/v1/chat")
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ParameterError("URL without scheme: " + url);
  }
  const auto path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

HttpResult post_json(const std::string& url, const Json& body,
                     const std::map<std::string, std::string>& headers,
                     std::chrono::seconds timeout) {
  auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + url + " failed: " +
                         httplib::to_string(res.error()));
  }
  return HttpResult{res->status, res->body};
}

Json post_json_checked(const std::string& url, const Json& body,
                       const std::map<std::string, std::string>& headers,
                       std::chrono::seconds timeout) {
  auto res = post_json(url, body, headers, timeout);
  if (res.status == 429 || res.status >= 500) {
    throw TransportError("POST " + url + " returned HTTP " +
                         std::to_string(res.status));
  }
  if (res.status < 200 || res.status >= 300) {
    throw Error("POST " + url + " returned HTTP " + std::to_string(res.status) +
                ": " + res.body.substr(0, 500));
  }
  try {
    return Json::parse(res.body);
  } catch (const Json::exception& e) {
    throw DataError("POST " + url + " returned non-JSON body: " + e.what());
  }
}

}  // namespace uqbench::backend
