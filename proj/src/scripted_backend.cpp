#include "wolf/scripted_backend.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wolf/errors.hpp"
#include "wolf/ids.hpp"

namespace wolf {

using nlohmann::json;

namespace {

bool meta_equals(const ChatRequest& request, const std::string& key,
                 const std::string& expected) {
  auto it = request.meta.find(key);
  return it != request.meta.end() && it->second == expected;
}

std::string expand_tokens(std::string reply, const ChatRequest& request) {
  auto replace_all = [](std::string& text, const std::string& token,
                        const std::string& value) {
    size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
      text.replace(pos, token.size(), value);
      pos += value.size();
    }
  };
  replace_all(reply, "{{PROMPT}}", request.user_text);
  if (reply.find("{{LAST_AGENT_REF}}") != std::string::npos) {
    auto ref = extract_last_agent_ref(request.user_text);
    replace_all(reply, "{{LAST_AGENT_REF}}", ref ? ref->label() : std::string());
  }
  return reply;
}

}  // namespace

bool ScriptMatch::matches(const ChatRequest& request_in) const {
  if (role && !meta_equals(request_in, "role", *role)) return false;
  if (request && !meta_equals(request_in, "request", *request)) return false;
  if (op && !meta_equals(request_in, "op", *op)) return false;
  if (day && !meta_equals(request_in, "day", std::to_string(*day))) return false;
  if (turn && !meta_equals(request_in, "turn", std::to_string(*turn))) return false;
  if (agent && !meta_equals(request_in, "agent", std::to_string(*agent))) return false;
  if (prompt_contains &&
      request_in.user_text.find(*prompt_contains) == std::string::npos)
    return false;
  return true;
}

bool ScriptMatch::is_catch_all() const {
  return !role && !request && !op && !day && !turn && !agent && !prompt_contains;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules)
    : rules_(std::move(rules)) {
  bool has_catch_all = false;
  for (const auto& rule : rules_) has_catch_all = has_catch_all || rule.match.is_catch_all();
  if (!has_catch_all)
    throw DomainError("scripted backend needs a catch-all rule (empty match)");
}

ScriptedBackend ScriptedBackend::from_json_text(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw DomainError("script is not a JSON object");
  auto rules_it = root.find("rules");
  if (rules_it == root.end() || !rules_it->is_array())
    throw DomainError("script has no rules array");

  std::vector<ScriptRule> rules;
  for (const auto& node : *rules_it) {
    if (!node.is_object()) throw DomainError("script rule is not an object");
    ScriptRule rule;
    auto match_it = node.find("match");
    if (match_it != node.end()) {
      if (!match_it->is_object()) throw DomainError("script rule match is not an object");
      const json& m = *match_it;
      auto opt_string = [&m](const char* key) -> std::optional<std::string> {
        auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        if (!it->is_string()) throw DomainError(std::string("match.") + key + " must be a string");
        return it->get<std::string>();
      };
      auto opt_int = [&m](const char* key) -> std::optional<int> {
        auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        if (!it->is_number_integer())
          throw DomainError(std::string("match.") + key + " must be an integer");
        return it->get<int>();
      };
      rule.match.role = opt_string("role");
      rule.match.request = opt_string("request");
      rule.match.op = opt_string("op");
      rule.match.day = opt_int("day");
      rule.match.turn = opt_int("turn");
      rule.match.agent = opt_int("agent");
      rule.match.prompt_contains = opt_string("prompt_contains");
    }
    auto reply_it = node.find("reply");
    if (reply_it == node.end() || !reply_it->is_string())
      throw DomainError("script rule has no reply string");
    rule.reply = reply_it->get<std::string>();
    rules.push_back(std::move(rule));
  }
  return ScriptedBackend(std::move(rules));
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open script file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::make_shared<ScriptedBackend>(from_json_text(buffer.str()));
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
  validate_chat_request(request);
  for (const auto& rule : rules_) {
    if (!rule.match.matches(request)) continue;
    ChatResponse response;
    response.text = expand_tokens(rule.reply, request);
    response.latency_ms = 0;
    response.backend_id = name();
    calls_.emplace_back(request, response);
    return response;
  }
  // Unreachable thanks to the catch-all check in the constructor.
  throw BackendError("no script rule matched", false);
}

}  // namespace wolf
