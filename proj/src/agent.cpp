#include "wolf/agent.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "wolf/errors.hpp"

namespace wolf {

std::string sanitize_talk_line(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_gap = false;
  for (char c : text) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      in_gap = true;
      continue;
    }
    if (in_gap && !out.empty()) out += ' ';
    in_gap = false;
    out += c;
  }
  if (out.empty()) return "Skip";
  return out;
}

Agent::Agent(std::shared_ptr<ChatBackend> backend,
             std::shared_ptr<const PromptLibrary> library, uint64_t seed,
             RetryPolicy retry)
    : backend_(std::move(backend)),
      library_(std::move(library)),
      rng_(seed),
      retry_(retry) {
  if (!backend_) throw DomainError("agent needs a backend");
  if (!library_) throw DomainError("agent needs a prompt library");
}

std::optional<std::string> Agent::handle_packet(const Packet& packet) {
  const GameInfoView& view = packet.game_info;
  if (packet.request != RequestKind::Initialize && !role_)
    throw ProtocolViolation("agent received " +
                            std::string(request_kind_name(packet.request)) +
                            " before INITIALIZE");
  serving_ = packet.request;
  switch (packet.request) {
    case RequestKind::Initialize:
      on_initialize(view);
      return std::nullopt;
    case RequestKind::DailyInitialize:
      on_daily_initialize(view);
      return std::nullopt;
    case RequestKind::Talk: {
      AgentResponse response;
      response.kind = AgentResponse::Kind::Talk;
      response.text = on_talk(view, *packet.turn);
      return render_response_line(response);
    }
    case RequestKind::Vote: {
      AgentResponse response;
      response.kind = AgentResponse::Kind::Target;
      response.target = on_vote(view);
      return render_response_line(response);
    }
    case RequestKind::Divine: {
      AgentResponse response;
      response.kind = AgentResponse::Kind::Target;
      response.target = on_divine(view);
      return render_response_line(response);
    }
    case RequestKind::Attack: {
      AgentResponse response;
      response.kind = AgentResponse::Kind::Target;
      response.target = on_attack(view);
      return render_response_line(response);
    }
    case RequestKind::Finish:
      return std::nullopt;
  }
  throw ProtocolViolation("agent received unknown request kind");
}

void Agent::on_initialize(const GameInfoView& view) {
  self_ = view.receiver;
  role_ = view.receiver_role;
  analysis_.reset();
  current_plan_.reset();
  plans_.clear();
  fabricated_.reset();

  task_text_ = library_->get("task_description")
                   .render({{"[SELF_ID]", self_.label()},
                            {"[SELF_ROLE]", role_word(*role_)}});
  rules_text_ = library_->get("game_rules").render({});

  if (*role_ == Role::Possessed) {
    // A fake seer claim, drawn once per game: a random other player and a
    // coin-flip species, then presented exactly like a real result.
    DivineRecord fake;
    fake.day = 0;
    fake.seer = self_;
    fake.target = random_other(view);
    fake.result = rng_.uniform_int(0, 1) == 0 ? Species::Human : Species::Werewolf;
    fabricated_ = fake;
  }
}

void Agent::on_daily_initialize(const GameInfoView& view) {
  (void)view;
  current_plan_.reset();
}

SituationAnalysis& Agent::refresh_analysis(const GameInfoView& view, int turn) {
  std::string template_id;
  switch (*role_) {
    case Role::Villager: template_id = "analysis_plain"; break;
    case Role::Seer:
    case Role::Possessed: template_id = "analysis_divination"; break;
    case Role::Werewolf: template_id = "analysis_werewolf"; break;
  }

  std::map<std::string, std::string> bindings = base_bindings();
  bindings["[DAY]"] = std::to_string(view.day);
  bindings["[SELF_ID]"] = self_.label();
  bindings["[ALIVE_LIST]"] = format_agent_list([&] {
    std::vector<AgentId> alive;
    for (const auto& [id, st] : view.status_map)
      if (st == AgentStatus::Alive) alive.push_back(id);
    return alive;
  }());
  bindings["[DIALOGUE_HISTORY]"] = format_dialogue_history(view.talk_list);
  if (template_id == "analysis_divination")
    bindings["[DIVINATION_RESULT]"] = divination_block(view);

  try {
    ChatRequest request = make_request(view, "analysis", turn,
                                       library_->get(template_id).render(bindings));
    SituationAnalysis fresh{view.day, turn, complete_with_retry(request), std::nullopt};
    auto named = extract_last_agent_ref(fresh.text);
    if (named && *named != self_ && view.status_map.at(*named) == AgentStatus::Alive)
      fresh.vote_target = *named;
    analysis_ = std::move(fresh);
  } catch (const BackendError&) {
    // Keep the previous analysis; start from a blank one if there is none.
    if (!analysis_) analysis_ = SituationAnalysis{view.day, turn, "", std::nullopt};
  } catch (const PromptError&) {
    if (!analysis_) analysis_ = SituationAnalysis{view.day, turn, "", std::nullopt};
  }
  return *analysis_;
}

const PersuasionPlan& Agent::ensure_plan(const GameInfoView& view) {
  if (current_plan_ && current_plan_->day == view.day) return *current_plan_;

  PersuasionPlan plan;
  plan.day = view.day;
  plan.schedule = {{3, PersuasionStrategy::Logical},
                   {4, PersuasionStrategy::Credibility},
                   {5, PersuasionStrategy::Emotional}};
  // The analysis may be reused from an earlier point, so its pick is checked
  // against the current status map before it is trusted.
  auto target = analysis_ ? analysis_->vote_target : std::nullopt;
  const bool usable = target && *target != self_ &&
                      view.status_map.at(*target) == AgentStatus::Alive;
  if (usable) {
    plan.target = *target;
  } else {
    plan.target = random_other(view);
    plan.from_fallback = true;
  }
  current_plan_ = plan;
  plans_.push_back(plan);
  return *current_plan_;
}

std::string Agent::on_talk(const GameInfoView& view, int turn) {
  const SituationAnalysis& analysis = refresh_analysis(view, turn);

  if (*role_ == Role::Werewolf && view.day >= 1 && strategy_for_turn(turn)) {
    const PersuasionPlan& plan = ensure_plan(view);
    const PersuasionStrategy strategy = plan.schedule.at(turn);
    const ExampleBank& bank = library_->bank(strategy);
    try {
      std::map<std::string, std::string> bindings = base_bindings();
      bindings["[CONDITION_ANALYSIS]"] = analysis.text;
      bindings["[VOTE_TARGET]"] = plan.target.label();
      bindings["[STRATEGY_NAME]"] = std::string(strategy_name(strategy));
      bindings["[PERSUASION_EXAMPLES]"] = bank.joined(plan.target);
      bindings["[DAY]"] = std::to_string(view.day);
      bindings["[TURN]"] = std::to_string(turn);
      bindings["[SELF_ID]"] = self_.label();
      ChatRequest request = make_request(view, "persuasion", turn,
                                         library_->get("persuasion").render(bindings));
      return sanitize_talk_line(complete_with_retry(request));
    } catch (const BackendError&) {
      return sanitize_talk_line(bank.substituted(0, plan.target));
    } catch (const PromptError&) {
      return sanitize_talk_line(bank.substituted(0, plan.target));
    }
  }

  const bool with_divination = *role_ == Role::Seer || *role_ == Role::Possessed;
  const std::string template_id = with_divination ? "response_divination" : "response_plain";
  try {
    std::map<std::string, std::string> bindings = base_bindings();
    bindings["[CONDITION_ANALYSIS]"] = analysis.text;
    bindings["[DIALOGUE_HISTORY]"] = format_dialogue_history(view.talk_list);
    bindings["[DAY]"] = std::to_string(view.day);
    bindings["[TURN]"] = std::to_string(turn);
    bindings["[SELF_ID]"] = self_.label();
    if (with_divination) bindings["[DIVINATION_RESULT]"] = divination_block(view);
    ChatRequest request = make_request(view, "response", turn,
                                       library_->get(template_id).render(bindings));
    return sanitize_talk_line(complete_with_retry(request));
  } catch (const BackendError&) {
    return "Skip";
  } catch (const PromptError&) {
    return "Skip";
  }
}

AgentId Agent::on_vote(const GameInfoView& view) {
  if (*role_ == Role::Werewolf) {
    // Vote where the speeches pointed; no model involved.
    if (current_plan_ && current_plan_->day == view.day &&
        view.status_map.at(current_plan_->target) == AgentStatus::Alive)
      return current_plan_->target;
    return random_other(view);
  }

  const SituationAnalysis& analysis = refresh_analysis(view, 0);
  try {
    std::map<std::string, std::string> bindings = base_bindings();
    bindings["[CONDITION_ANALYSIS]"] = analysis.text;
    bindings["[DIALOGUE_HISTORY]"] = format_dialogue_history(view.talk_list);
    bindings["[ALIVE_LIST]"] = format_agent_list(alive_others(view));
    ChatRequest request = make_request(view, "vote", 0,
                                       library_->get("voting").render(bindings));
    std::string reply = complete_with_retry(request);
    auto target = extract_last_agent_ref(reply);
    if (target && *target != self_ &&
        view.status_map.at(*target) == AgentStatus::Alive)
      return *target;
    return random_other(view);
  } catch (const BackendError&) {
    return random_other(view);
  } catch (const PromptError&) {
    return random_other(view);
  }
}

AgentId Agent::on_divine(const GameInfoView& view) {
  if (*role_ != Role::Seer)
    throw ProtocolViolation("DIVINE sent to a non-seer agent");
  std::vector<AgentId> fresh;
  for (AgentId id : alive_others(view)) {
    bool seen = false;
    for (const auto& record : view.divine_results) seen = seen || record.target == id;
    if (!seen) fresh.push_back(id);
  }
  if (!fresh.empty()) return rng_.pick(fresh);
  return random_other(view);
}

AgentId Agent::on_attack(const GameInfoView& view) {
  if (*role_ != Role::Werewolf)
    throw ProtocolViolation("ATTACK sent to a non-werewolf agent");
  if (current_plan_ && current_plan_->day == view.day &&
      view.status_map.at(current_plan_->target) == AgentStatus::Alive)
    return current_plan_->target;
  return random_other(view);
}

std::string Agent::complete_with_retry(const ChatRequest& request) {
  int attempt = 0;
  for (;;) {
    try {
      return backend_->complete(request).text;
    } catch (const BackendError& err) {
      if (!err.retryable() || attempt >= retry_.retries) throw;
      if (retry_.backoff_base_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long>(retry_.backoff_base_ms) << attempt));
      }
      ++attempt;
    }
  }
}

ChatRequest Agent::make_request(const GameInfoView& view, const std::string& op,
                                int turn, std::string user_text) const {
  ChatRequest request;
  // Every completion is stateless, so the parts a model must always see
  // (task, rules) travel inside the rendered user text; the system line only
  // frames the exchange.
  request.system_text =
      "You are playing a five-player Werewolf party game. Follow the "
      "instructions in each message exactly.";
  request.user_text = std::move(user_text);
  request.meta["role"] = std::string(role_name(*role_));
  request.meta["request"] = std::string(request_kind_name(serving_));
  request.meta["op"] = op;
  request.meta["day"] = std::to_string(view.day);
  request.meta["turn"] = std::to_string(turn);
  request.meta["agent"] = std::to_string(self_.index());
  return request;
}

std::map<std::string, std::string> Agent::base_bindings() const {
  return {{"[TASK_DESCRIPTION]", task_text_}, {"[GAME_RULES]", rules_text_}};
}

std::string Agent::divination_block(const GameInfoView& view) const {
  if (*role_ == Role::Possessed) {
    std::vector<DivineRecord> fake;
    if (fabricated_) fake.push_back(*fabricated_);
    return format_divination_block(fake);
  }
  return format_divination_block(view.divine_results);
}

std::vector<AgentId> Agent::alive_others(const GameInfoView& view) const {
  std::vector<AgentId> out;
  for (const auto& [id, st] : view.status_map)
    if (st == AgentStatus::Alive && id != self_) out.push_back(id);
  return out;
}

AgentId Agent::random_other(const GameInfoView& view) {
  auto candidates = alive_others(view);
  if (candidates.empty()) throw DomainError("no legal target available");
  return rng_.pick(candidates);
}

}  // namespace wolf
