#ifdef LEXDIFF_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include <cstdlib>

#include "lexdiff/errors.hpp"
#include "lexdiff/gateway.hpp"

namespace lexdiff {

HttpTransport::HttpTransport(GatewayConfig config) : config_(std::move(config)) { config_.validate(); }

std::string HttpTransport::post(const std::string& request_body) {
  const char* token = std::getenv(config_.token_env.c_str());
  if (!token || !*token) throw ConfigError("environment variable " + config_.token_env + " is not set");

  const auto scheme_end = config_.endpoint.find("://");
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  const std::string origin = config_.endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
#ifndef LEXDIFF_WITH_OPENSSL
  if (origin.rfind("https://", 0) == 0) throw ConfigError("built without TLS support; use an http:// endpoint");
#endif

  httplib::Client client(origin);
  auto seconds = static_cast<time_t>(config_.timeout_seconds);
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);
  httplib::Headers headers{{"Authorization", std::string("Bearer ") + token}};
  auto res = client.Post(path, headers, request_body, "application/json");
  if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + origin);
  }
  return res->body;
}

}  // namespace lexdiff
