#pragma once

#include <map>
#include <string>

namespace wolf {

// One chat completion call. `meta` is bookkeeping for scripted matching and
// diagnostics; it never travels to a real model endpoint.
struct ChatRequest {
  std::string system_text;
  std::string user_text;
  double temperature = 0.7;
  int max_tokens = 512;
  std::map<std::string, std::string> meta;

  bool operator==(const ChatRequest&) const = default;
};

// `text` is the raw completion, untrimmed; any cleanup happens downstream.
struct ChatResponse {
  std::string text;
  int latency_ms = 0;
  std::string backend_id;

  bool operator==(const ChatResponse&) const = default;
};

// Throws DomainError unless the request carries non-empty user text.
void validate_chat_request(const ChatRequest& request);

// A chat-completion source. Implementations throw BackendError on failure;
// retryable() on the error tells the caller whether trying again can help.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

}  // namespace wolf
