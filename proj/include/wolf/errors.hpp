#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace wolf {

// Invalid value or rule violation in the game domain (bad agent index,
// empty vote list, unknown divination target, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A request that does not match the current phase, or one sent to a role
// that cannot serve it.
class ProtocolViolation : public std::runtime_error {
 public:
  explicit ProtocolViolation(const std::string& what) : std::runtime_error(what) {}
};

// An action response with no parseable target. The server maps this to its
// fallback policy instead of aborting the game.
class MalformedResponse : public std::runtime_error {
 public:
  explicit MalformedResponse(const std::string& what) : std::runtime_error(what) {}
};

// Chat backend failure. retryable() separates transient transport problems
// from hard failures such as rejected credentials.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, bool retryable)
      : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// Prompt template failure: unbound slot, unused binding, or a marker left
// in the rendered text.
class PromptError : public std::runtime_error {
 public:
  explicit PromptError(const std::string& what) : std::runtime_error(what) {}
};

// Game log that cannot be parsed or fails re-simulation. Carries the index
// of the offending event when known.
class ReplayError : public std::runtime_error {
 public:
  explicit ReplayError(const std::string& what,
                       std::optional<std::size_t> event_index = std::nullopt)
      : std::runtime_error(what), event_index_(event_index) {}
  std::optional<std::size_t> event_index() const { return event_index_; }

 private:
  std::optional<std::size_t> event_index_;
};

}  // namespace wolf
