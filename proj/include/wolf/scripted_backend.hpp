#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wolf/backend.hpp"

namespace wolf {

// Predicate over a ChatRequest. Unset fields are wildcards; string fields
// compare against the request's meta entries, prompt_contains is a substring
// test on the user text. An all-wildcard match is a catch-all.
struct ScriptMatch {
  std::optional<std::string> role;     // meta "role"
  std::optional<std::string> request;  // meta "request"
  std::optional<std::string> op;       // meta "op"
  std::optional<int> day;              // meta "day"
  std::optional<int> turn;             // meta "turn"
  std::optional<int> agent;            // meta "agent"
  std::optional<std::string> prompt_contains;

  bool matches(const ChatRequest& request_in) const;
  bool is_catch_all() const;
};

struct ScriptRule {
  ScriptMatch match;
  std::string reply;
};

// Deterministic offline stand-in for a model endpoint. Rules are tried in
// order and the first match wins; construction rejects rule sets without a
// catch-all, so complete() can never come up empty. Replies may use the
// tokens {{PROMPT}} (the user text) and {{LAST_AGENT_REF}} (the last
// "Agent[0k]" mentioned in the user text, empty when there is none).
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptRule> rules);

  static ScriptedBackend from_json_text(const std::string& text);
  static std::shared_ptr<ScriptedBackend> load_file(const std::filesystem::path& path);

  ChatResponse complete(const ChatRequest& request) override;
  std::string name() const override { return "scripted"; }

  // Full in-order call history: every request paired with the reply it got.
  const std::vector<std::pair<ChatRequest, ChatResponse>>& recorded_calls() const {
    return calls_;
  }
  void clear_recorded() { calls_.clear(); }

 private:
  std::vector<ScriptRule> rules_;
  std::vector<std::pair<ChatRequest, ChatResponse>> calls_;
};

}  // namespace wolf
