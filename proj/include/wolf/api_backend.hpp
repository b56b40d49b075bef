#pragma once

#include <string>

#include "wolf/backend.hpp"

namespace wolf {

// Connection settings for an OpenAI-style chat completion endpoint. The key
// is pulled from the named environment variable at call time so credentials
// never sit in config files or logs.
struct ApiConfig {
  std::string url;  // full endpoint, e.g. "http://host:1234/v1/chat/completions"
  std::string api_key_env;  // env var with the bearer token; empty = no auth header
  std::string model = "gpt-4";
  int timeout_ms = 30000;
};

// Splits a URL into the scheme://host:port base and the request path
// ("/" when absent). Throws DomainError on text that is not an http(s) URL.
std::pair<std::string, std::string> split_url(const std::string& url);

class ApiBackend : public ChatBackend {
 public:
  explicit ApiBackend(ApiConfig config);

  // POSTs {model, messages:[system, user], temperature, max_tokens} and
  // returns the first choice's message content. BackendError::retryable() is
  // true for transport failures, timeouts, 408/429 and 5xx statuses; false
  // for other client errors (401/403 included) and unparseable reply bodies.
  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "api"; }

  const ApiConfig& config() const { return config_; }

 private:
  ApiConfig config_;
};

}  // namespace wolf
