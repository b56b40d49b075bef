#include "wolf/api_backend.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "wolf/errors.hpp"

namespace wolf {

using nlohmann::json;

std::pair<std::string, std::string> split_url(const std::string& url) {
  const std::string http = "http://";
  const std::string https = "https://";
  size_t scheme_end = 0;
  if (url.rfind(http, 0) == 0)
    scheme_end = http.size();
  else if (url.rfind(https, 0) == 0)
    scheme_end = https.size();
  else
    throw DomainError("endpoint url must start with http:// or https://: " + url);
  size_t slash = url.find('/', scheme_end);
  if (url.size() == scheme_end || slash == scheme_end)
    throw DomainError("endpoint url has no host: " + url);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

ApiBackend::ApiBackend(ApiConfig config) : config_(std::move(config)) {
  split_url(config_.url);  // fail fast on malformed endpoints
  if (config_.model.empty()) throw DomainError("api backend needs a model name");
  if (config_.timeout_ms <= 0) throw DomainError("api timeout must be positive");
}

ChatResponse ApiBackend::complete(const ChatRequest& request) {
  validate_chat_request(request);
  const auto started = std::chrono::steady_clock::now();
  auto [base, path] = split_url(config_.url);

  httplib::Client client(base);
  if (!client.is_valid())
    throw BackendError("cannot create client for " + base +
                           " (https endpoints need a TLS-enabled build)",
                       false);
  client.set_connection_timeout(0, config_.timeout_ms * 1000);
  client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
  client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw BackendError("environment variable " + config_.api_key_env +
                             " is empty; cannot authenticate",
                         false);
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json body;
  body["model"] = config_.model;
  body["messages"] = json::array({json{{"role", "system"}, {"content", request.system_text}},
                                  json{{"role", "user"}, {"content", request.user_text}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;

  auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result)
    throw BackendError("transport failure talking to " + base + ": " +
                           httplib::to_string(result.error()),
                       true);

  const int status = result->status;
  if (status != 200) {
    const bool retryable = status == 408 || status == 429 || status >= 500;
    throw BackendError("endpoint returned HTTP " + std::to_string(status), retryable);
  }

  json reply = json::parse(result->body, nullptr, false);
  if (reply.is_discarded())
    throw BackendError("endpoint returned unparseable JSON", false);
  auto choices = reply.find("choices");
  if (choices == reply.end() || !choices->is_array() || choices->empty())
    throw BackendError("endpoint reply has no choices", false);
  const json& first = choices->front();
  auto message = first.find("message");
  if (message == first.end() || !message->is_object())
    throw BackendError("endpoint reply choice has no message", false);
  auto content = message->find("content");
  if (content == message->end() || !content->is_string())
    throw BackendError("endpoint reply message has no content", false);

  ChatResponse response;
  response.text = content->get<std::string>();
  response.latency_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                             std::chrono::steady_clock::now() - started)
                                             .count());
  response.backend_id = name();
  return response;
}

}  // namespace wolf
