#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "wolf/agent.hpp"
#include "wolf/errors.hpp"
#include "wolf/paths.hpp"
#include "wolf/scripted_backend.hpp"

using namespace wolf;

namespace {

std::shared_ptr<const PromptLibrary> shared_library() {
  static auto library = std::make_shared<const PromptLibrary>(
      PromptLibrary::load_from_dir(language_dir(default_data_dir(), "en")));
  return library;
}

GameInfoView make_view(AgentId receiver, Role role, int day,
                       PhaseKind phase = PhaseKind::DayTalk) {
  GameInfoView view;
  view.day = day;
  view.phase = phase;
  view.receiver = receiver;
  view.receiver_role = role;
  for (AgentId id : all_agents()) view.status_map[id] = AgentStatus::Alive;
  return view;
}

Packet init_packet(const GameInfoView& view) {
  Packet packet;
  packet.request = RequestKind::Initialize;
  packet.game_info = view;
  return packet;
}

Packet daily_packet(GameInfoView view, int day) {
  view.day = day;
  Packet packet;
  packet.request = RequestKind::DailyInitialize;
  packet.game_info = std::move(view);
  return packet;
}

Packet talk_packet(GameInfoView view, int turn) {
  view.phase = PhaseKind::DayTalk;
  Packet packet;
  packet.request = RequestKind::Talk;
  packet.game_info = std::move(view);
  packet.turn = turn;
  return packet;
}

Packet vote_packet(GameInfoView view) {
  view.phase = PhaseKind::NightVote;
  Packet packet;
  packet.request = RequestKind::Vote;
  packet.game_info = std::move(view);
  return packet;
}

Packet request_packet(RequestKind kind, GameInfoView view) {
  Packet packet;
  packet.request = kind;
  packet.game_info = std::move(view);
  return packet;
}

ScriptRule rule_for_op(const std::string& op, const std::string& reply) {
  ScriptRule rule;
  rule.match.op = op;
  rule.reply = reply;
  return rule;
}

ScriptRule catch_all(const std::string& reply) {
  ScriptRule rule;
  rule.reply = reply;
  return rule;
}

// Test double whose behavior is a plain function, for failure injection.
class ProgrammableBackend : public ChatBackend {
 public:
  using Handler = std::function<ChatResponse(const ChatRequest&)>;
  explicit ProgrammableBackend(Handler handler) : handler_(std::move(handler)) {}

  ChatResponse complete(const ChatRequest& request) override {
    validate_chat_request(request);
    calls.push_back(request);
    ChatResponse response = handler_(request);
    response.backend_id = name();
    return response;
  }
  std::string name() const override { return "programmable"; }

  std::vector<ChatRequest> calls;

 private:
  Handler handler_;
};

ChatResponse text_response(const std::string& text) {
  ChatResponse response;
  response.text = text;
  return response;
}

}  // namespace

TEST_CASE("one-line sanitizer collapses whitespace and never returns empty") {
  CHECK(sanitize_talk_line("plain words") == "plain words");
  CHECK(sanitize_talk_line("  lead and trail \n") == "lead and trail");
  CHECK(sanitize_talk_line("two\nlines\r\nhere") == "two lines here");
  CHECK(sanitize_talk_line("tabs\t\tand   runs") == "tabs and runs");
  CHECK(sanitize_talk_line("") == "Skip");
  CHECK(sanitize_talk_line(" \n\t ") == "Skip");
}

TEST_CASE("any request before initialize is a protocol violation") {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<ScriptRule>{catch_all("hi")});
  Agent agent(backend, shared_library(), 1, RetryPolicy{2, 0});
  auto view = make_view(AgentId(1), Role::Villager, 0);
  CHECK_THROWS_AS(agent.handle_packet(talk_packet(view, 1)), ProtocolViolation);
  CHECK_THROWS_AS(agent.handle_packet(vote_packet(view)), ProtocolViolation);
}

TEST_CASE("initialize and finish take no reply; talk replies") {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<ScriptRule>{catch_all("something to say")});
  Agent agent(backend, shared_library(), 2, RetryPolicy{2, 0});
  auto view = make_view(AgentId(3), Role::Villager, 0);

  CHECK_FALSE(agent.handle_packet(init_packet(view)).has_value());
  CHECK(agent.self() == AgentId(3));
  CHECK(agent.role() == Role::Villager);

  auto reply = agent.handle_packet(talk_packet(view, 1));
  REQUIRE(reply.has_value());
  CHECK(*reply == "something to say");

  CHECK_FALSE(agent.handle_packet(request_packet(RequestKind::Finish, view)).has_value());
}

TEST_CASE("villager talk turn: analysis first, then the response completion") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      rule_for_op("analysis", "My analysis: Agent[05] is suspicious. Agent[05]."),
      rule_for_op("response", "I think we watch Agent[05] closely."),
      catch_all("Skip")});
  Agent agent(backend, shared_library(), 3, RetryPolicy{2, 0});
  auto view = make_view(AgentId(2), Role::Villager, 1);
  view.talk_list.push_back({1, 1, AgentId(1), "Good morning."});
  agent.handle_packet(init_packet(view));

  auto reply = agent.handle_packet(talk_packet(view, 2));
  REQUIRE(reply.has_value());
  CHECK(*reply == "I think we watch Agent[05] closely.");

  const auto& calls = backend->recorded_calls();
  REQUIRE(calls.size() == 2);

  const ChatRequest& analysis = calls[0].first;
  CHECK(analysis.meta.at("op") == "analysis");
  CHECK(analysis.meta.at("role") == "VILLAGER");
  CHECK(analysis.meta.at("request") == "TALK");
  CHECK(analysis.meta.at("day") == "1");
  CHECK(analysis.meta.at("turn") == "2");
  CHECK(analysis.meta.at("agent") == "2");
  // The rendered prompt is self-contained: task framing, rules, history.
  CHECK(analysis.user_text.find("Agent[02]") != std::string::npos);
  CHECK(analysis.user_text.find("villager") != std::string::npos);
  CHECK(analysis.user_text.find("Good morning.") != std::string::npos);
  CHECK(analysis.user_text.find("[TASK_DESCRIPTION]") == std::string::npos);
  CHECK(analysis.user_text.find("[GAME_RULES]") == std::string::npos);
  CHECK(analysis.system_text.find("five-player Werewolf") != std::string::npos);

  const ChatRequest& response = calls[1].first;
  CHECK(response.meta.at("op") == "response");
  // The response stage sees the fresh analysis verbatim.
  CHECK(response.user_text.find("My analysis: Agent[05] is suspicious.") !=
        std::string::npos);
  CHECK(response.user_text.find("Good morning.") != std::string::npos);
}

TEST_CASE("non-werewolf vote: analysis plus voting completion, last reference wins") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      rule_for_op("analysis", "Thinking aloud without naming anyone."),
      rule_for_op("vote", "Maybe Agent[02]... no. Final answer: Agent[04]."),
      catch_all("Skip")});
  Agent agent(backend, shared_library(), 4, RetryPolicy{2, 0});
  auto view = make_view(AgentId(1), Role::Seer, 1);
  agent.handle_packet(init_packet(view));

  auto reply = agent.handle_packet(vote_packet(view));
  REQUIRE(reply.has_value());
  CHECK(*reply == "Agent[04]");

  const auto& calls = backend->recorded_calls();
  REQUIRE(calls.size() == 2);
  CHECK(calls[0].first.meta.at("op") == "analysis");
  CHECK(calls[1].first.meta.at("op") == "vote");
  // The candidate list offered to the vote prompt excludes the voter.
  CHECK(calls[1].first.user_text.find("Agent[02], Agent[03], Agent[04], Agent[05]") !=
        std::string::npos);
}

TEST_CASE("a vote reply with no usable name falls back to a seeded legal pick") {
  auto make_agent = [](uint64_t seed) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
        rule_for_op("vote", "I refuse to name anyone."), catch_all("mm")});
    return std::make_pair(backend,
                          std::make_shared<Agent>(backend, shared_library(), seed,
                                                  RetryPolicy{2, 0}));
  };
  auto view = make_view(AgentId(3), Role::Villager, 1);
  view.status_map[AgentId(4)] = AgentStatus::Exiled;

  auto [backend_a, agent_a] = make_agent(99);
  agent_a->handle_packet(init_packet(view));
  auto reply_a = agent_a->handle_packet(vote_packet(view));

  auto [backend_b, agent_b] = make_agent(99);
  agent_b->handle_packet(init_packet(view));
  auto reply_b = agent_b->handle_packet(vote_packet(view));

  REQUIRE(reply_a.has_value());
  CHECK(*reply_a == *reply_b);  // pure function of the seed
  auto target = extract_last_agent_ref(*reply_a);
  REQUIRE(target.has_value());
  CHECK(*target != AgentId(3));          // not self
  CHECK(*target != AgentId(4));          // not the dead
}

TEST_CASE("werewolf persuasion: schedule order, frozen target, votes with zero calls") {
  // Per-turn analysis targets: turn 3 names 4, turns 4/5 try to change to 2.
  ScriptRule turn3;
  turn3.match.op = "analysis";
  turn3.match.turn = 3;
  turn3.reply = "The biggest threat to me is Agent[04].";
  ScriptRule later_turns;
  later_turns.match.op = "analysis";
  later_turns.reply = "Now I would rather blame Agent[02].";
  ScriptRule persuasion;
  persuasion.match.op = "persuasion";
  persuasion.reply = "Persuading with {{LAST_AGENT_REF}}.";
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      turn3, later_turns, persuasion, catch_all("Skip")});

  Agent agent(backend, shared_library(), 5, RetryPolicy{2, 0});
  auto view = make_view(AgentId(1), Role::Werewolf, 1);
  agent.handle_packet(init_packet(view));
  agent.handle_packet(daily_packet(view, 1));

  const ExampleBank& logical = shared_library()->bank(PersuasionStrategy::Logical);
  const ExampleBank& credibility = shared_library()->bank(PersuasionStrategy::Credibility);
  const ExampleBank& emotional = shared_library()->bank(PersuasionStrategy::Emotional);

  for (int turn : {3, 4, 5}) {
    auto reply = agent.handle_packet(talk_packet(view, turn));
    REQUIRE(reply.has_value());
  }

  const auto& calls = backend->recorded_calls();
  REQUIRE(calls.size() == 6);  // (analysis + persuasion) x 3

  // Turn 3: logical appeal against the analysis pick.
  CHECK(calls[0].first.meta.at("op") == "analysis");
  CHECK(calls[1].first.meta.at("op") == "persuasion");
  CHECK(calls[1].first.meta.at("turn") == "3");
  CHECK(calls[1].first.user_text.find("Logical Appeal") != std::string::npos);
  CHECK(calls[1].first.user_text.find(logical.joined(AgentId(4))) != std::string::npos);

  // Turns 4 and 5 keep the frozen target even though analyses moved on.
  CHECK(calls[3].first.user_text.find("Credibility Appeal") != std::string::npos);
  CHECK(calls[3].first.user_text.find(credibility.joined(AgentId(4))) != std::string::npos);
  CHECK(calls[5].first.user_text.find("Emotional Appeal") != std::string::npos);
  CHECK(calls[5].first.user_text.find(emotional.joined(AgentId(4))) != std::string::npos);

  for (size_t i : {1u, 3u, 5u}) {
    CHECK(calls[i].first.user_text.find("[VOTE_TARGET]") == std::string::npos);
    CHECK(calls[i].first.user_text.find("Agent[04]") != std::string::npos);
  }

  REQUIRE(agent.plan_history().size() == 1);
  const PersuasionPlan& plan = agent.plan_history().front();
  CHECK(plan.day == 1);
  CHECK(plan.target == AgentId(4));
  CHECK_FALSE(plan.from_fallback);
  CHECK(plan.schedule.at(3) == PersuasionStrategy::Logical);
  CHECK(plan.schedule.at(4) == PersuasionStrategy::Credibility);
  CHECK(plan.schedule.at(5) == PersuasionStrategy::Emotional);

  // The night vote follows the plan without touching the backend.
  backend->clear_recorded();
  auto vote = agent.handle_packet(vote_packet(view));
  REQUIRE(vote.has_value());
  CHECK(*vote == "Agent[04]");
  CHECK(backend->recorded_calls().empty());

  // The attack follows the plan too while the target still lives.
  auto attack_view = view;
  attack_view.phase = PhaseKind::NightAttack;
  auto attack = agent.handle_packet(request_packet(RequestKind::Attack, attack_view));
  REQUIRE(attack.has_value());
  CHECK(*attack == "Agent[04]");
}

TEST_CASE("werewolf early talk turns are plain responses, day 0 included") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      rule_for_op("analysis", "Quiet thoughts."),
      rule_for_op("response", "A normal greeting."), catch_all("Skip")});
  Agent agent(backend, shared_library(), 6, RetryPolicy{2, 0});
  auto view0 = make_view(AgentId(5), Role::Werewolf, 0);
  agent.handle_packet(init_packet(view0));

  // Day 0 has no persuasion even on turns 3..5.
  for (int turn : {1, 3, 5}) {
    auto reply = agent.handle_packet(talk_packet(view0, turn));
    REQUIRE(reply.has_value());
    CHECK(*reply == "A normal greeting.");
  }
  // Day 1 turns 1..2 are plain as well.
  auto view1 = make_view(AgentId(5), Role::Werewolf, 1);
  agent.handle_packet(daily_packet(view1, 1));
  auto reply = agent.handle_packet(talk_packet(view1, 2));
  CHECK(*reply == "A normal greeting.");
  for (const auto& [request, response] : backend->recorded_calls())
    CHECK(request.meta.at("op") != "persuasion");
  CHECK(agent.plan_history().empty());
}

TEST_CASE("an unusable analysis pick makes the plan fall back to a seeded draw") {
  auto make_agent = [](uint64_t seed) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
        rule_for_op("analysis", "The threat is... myself, Agent[01]."),
        rule_for_op("persuasion", "pitch"), catch_all("Skip")});
    return std::make_shared<Agent>(backend, shared_library(), seed, RetryPolicy{2, 0});
  };
  auto view = make_view(AgentId(1), Role::Werewolf, 1);

  auto agent_a = make_agent(1234);
  agent_a->handle_packet(init_packet(view));
  agent_a->handle_packet(talk_packet(view, 3));
  REQUIRE(agent_a->plan_history().size() == 1);
  const PersuasionPlan& plan = agent_a->plan_history().front();
  CHECK(plan.from_fallback);
  CHECK(plan.target != AgentId(1));

  auto agent_b = make_agent(1234);
  agent_b->handle_packet(init_packet(view));
  agent_b->handle_packet(talk_packet(view, 3));
  CHECK(agent_b->plan_history().front().target == plan.target);
}

TEST_CASE("daily initialize opens a fresh plan the next day") {
  ScriptRule day1;
  day1.match.op = "analysis";
  day1.match.day = 1;
  day1.reply = "Today it is Agent[03].";
  ScriptRule day2;
  day2.match.op = "analysis";
  day2.match.day = 2;
  day2.reply = "Today it is Agent[02].";
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      day1, day2, rule_for_op("persuasion", "pitch"), catch_all("Skip")});
  Agent agent(backend, shared_library(), 7, RetryPolicy{2, 0});

  auto view = make_view(AgentId(1), Role::Werewolf, 1);
  agent.handle_packet(init_packet(view));
  agent.handle_packet(daily_packet(view, 1));
  agent.handle_packet(talk_packet(view, 3));

  auto view2 = make_view(AgentId(1), Role::Werewolf, 2);
  view2.status_map[AgentId(3)] = AgentStatus::Exiled;
  agent.handle_packet(daily_packet(view2, 2));
  agent.handle_packet(talk_packet(view2, 3));

  REQUIRE(agent.plan_history().size() == 2);
  CHECK(agent.plan_history()[0].day == 1);
  CHECK(agent.plan_history()[0].target == AgentId(3));
  CHECK(agent.plan_history()[1].day == 2);
  CHECK(agent.plan_history()[1].target == AgentId(2));

  // With the old target dead, the day-2 vote follows the new plan.
  auto vote = agent.handle_packet(vote_packet(view2));
  CHECK(*vote == "Agent[02]");
}

TEST_CASE("a werewolf vote with no plan yet draws a seeded legal target") {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<ScriptRule>{catch_all("Skip")});
  Agent agent(backend, shared_library(), 8, RetryPolicy{2, 0});
  auto view = make_view(AgentId(2), Role::Werewolf, 1);
  view.status_map[AgentId(5)] = AgentStatus::Attacked;
  agent.handle_packet(init_packet(view));

  auto vote = agent.handle_packet(vote_packet(view));
  REQUIRE(vote.has_value());
  CHECK(backend->recorded_calls().empty());
  auto target = extract_last_agent_ref(*vote);
  REQUIRE(target.has_value());
  CHECK(*target != AgentId(2));
  CHECK(*target != AgentId(5));
}

TEST_CASE("possessed fabricates one divination and presents it everywhere") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      rule_for_op("analysis", "Hmm."), rule_for_op("response", "My claim stands."),
      catch_all("Skip")});
  Agent agent(backend, shared_library(), 4321, RetryPolicy{2, 0});
  auto view = make_view(AgentId(3), Role::Possessed, 0);
  agent.handle_packet(init_packet(view));

  REQUIRE(agent.fabricated_divination().has_value());
  const DivineRecord fake = *agent.fabricated_divination();
  CHECK(fake.seer == AgentId(3));
  CHECK(fake.target != AgentId(3));
  CHECK(fake.day == 0);

  const std::string sentence = format_divination_sentence(fake);
  agent.handle_packet(talk_packet(view, 1));
  auto view1 = make_view(AgentId(3), Role::Possessed, 1);
  agent.handle_packet(daily_packet(view1, 1));
  agent.handle_packet(talk_packet(view1, 2));

  int carried = 0;
  for (const auto& [request, response] : backend->recorded_calls()) {
    if (request.meta.at("op") == "analysis" || request.meta.at("op") == "response") {
      CHECK(request.user_text.find(sentence) != std::string::npos);
      ++carried;
    }
  }
  CHECK(carried == 4);  // two talk turns, two stages each

  // Same seed, fresh agent: the same fabrication comes out.
  auto backend2 = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      catch_all("Skip")});
  Agent twin(backend2, shared_library(), 4321, RetryPolicy{2, 0});
  twin.handle_packet(init_packet(view));
  REQUIRE(twin.fabricated_divination().has_value());
  CHECK(*twin.fabricated_divination() == fake);
}

TEST_CASE("seer carries its real results and divines fresh targets first") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{
      rule_for_op("analysis", "Noted."), rule_for_op("response", "I saw things."),
      catch_all("Skip")});
  Agent agent(backend, shared_library(), 9, RetryPolicy{2, 0});
  auto view = make_view(AgentId(2), Role::Seer, 1, PhaseKind::NightDivine);
  view.divine_results.push_back({0, AgentId(2), AgentId(4), Species::Human});
  agent.handle_packet(init_packet(view));

  // Prompts carry the genuine record.
  agent.handle_packet(talk_packet(view, 1));
  const std::string sentence =
      format_divination_sentence(view.divine_results.front());
  bool present = false;
  for (const auto& [request, response] : backend->recorded_calls())
    present = present || request.user_text.find(sentence) != std::string::npos;
  CHECK(present);

  // Divination avoids already-seen targets while any remain.
  backend->clear_recorded();
  std::set<AgentId> chosen;
  for (int i = 0; i < 40; ++i) {
    auto reply = agent.handle_packet(request_packet(RequestKind::Divine, view));
    REQUIRE(reply.has_value());
    auto target = extract_last_agent_ref(*reply);
    REQUIRE(target.has_value());
    CHECK(*target != AgentId(2));
    CHECK(*target != AgentId(4));  // already divined
    chosen.insert(*target);
  }
  CHECK(chosen.size() == 3);  // all of 1, 3, 5 get drawn eventually
  CHECK(backend->recorded_calls().empty());  // no model in the loop

  // Once everyone alive has been seen, any legal target is acceptable.
  auto seen_all = view;
  seen_all.divine_results.push_back({1, AgentId(2), AgentId(1), Species::Werewolf});
  seen_all.divine_results.push_back({1, AgentId(2), AgentId(3), Species::Human});
  seen_all.divine_results.push_back({1, AgentId(2), AgentId(5), Species::Human});
  auto reply = agent.handle_packet(request_packet(RequestKind::Divine, seen_all));
  auto target = extract_last_agent_ref(*reply);
  REQUIRE(target.has_value());
  CHECK(*target != AgentId(2));
}

TEST_CASE("divine to a non-seer and attack to a non-wolf are protocol violations") {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<ScriptRule>{catch_all("Skip")});
  Agent villager(backend, shared_library(), 10, RetryPolicy{2, 0});
  auto view = make_view(AgentId(4), Role::Villager, 1);
  villager.handle_packet(init_packet(view));
  CHECK_THROWS_AS(villager.handle_packet(request_packet(RequestKind::Divine, view)),
                  ProtocolViolation);
  CHECK_THROWS_AS(villager.handle_packet(request_packet(RequestKind::Attack, view)),
                  ProtocolViolation);
}

TEST_CASE("stage failures degrade: analysis reuse, skip, recitation, random vote") {
  SUBCASE("analysis failure reuses the previous day's text") {
    int analysis_count = 0;
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "analysis") {
            ++analysis_count;
            if (analysis_count > 1)
              throw BackendError("analysis down", false);
            return text_response("First sight: watch Agent[05].");
          }
          return text_response("spoken line");
        });
    Agent agent(backend, shared_library(), 11, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    agent.handle_packet(talk_packet(view, 1));
    agent.handle_packet(talk_packet(view, 2));  // analysis fails here

    // The turn-2 response still carries the turn-1 analysis.
    const ChatRequest& last = backend->calls.back();
    CHECK(last.meta.at("op") == "response");
    CHECK(last.user_text.find("First sight: watch Agent[05].") != std::string::npos);
    REQUIRE(agent.last_analysis().has_value());
    CHECK(agent.last_analysis()->turn == 1);
  }

  SUBCASE("analysis failure with no history leaves a blank analysis") {
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "analysis")
            throw BackendError("analysis down", false);
          return text_response("still talking");
        });
    Agent agent(backend, shared_library(), 12, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 1));
    CHECK(*reply == "still talking");
    REQUIRE(agent.last_analysis().has_value());
    CHECK(agent.last_analysis()->text.empty());
  }

  SUBCASE("response failure talks Skip") {
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "response")
            throw BackendError("response down", false);
          return text_response("fine");
        });
    Agent agent(backend, shared_library(), 13, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 1));
    CHECK(*reply == "Skip");
  }

  SUBCASE("persuasion failure recites the first bank example") {
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "persuasion")
            throw BackendError("persuasion down", false);
          return text_response("I fear Agent[02] most of all, yes, Agent[02].");
        });
    Agent agent(backend, shared_library(), 14, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Werewolf, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 3));
    const ExampleBank& logical = shared_library()->bank(PersuasionStrategy::Logical);
    CHECK(*reply == sanitize_talk_line(logical.substituted(0, AgentId(2))));
  }

  SUBCASE("vote failure draws a random legal target") {
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "vote")
            throw BackendError("vote down", false);
          return text_response("um");
        });
    Agent agent(backend, shared_library(), 15, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(vote_packet(view));
    REQUIRE(reply.has_value());
    auto target = extract_last_agent_ref(*reply);
    REQUIRE(target.has_value());
    CHECK(*target != AgentId(1));
  }
}

TEST_CASE("retry policy: retryable errors are retried, hard errors are not") {
  SUBCASE("two transient failures then success") {
    int attempts = 0;
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "response") {
            ++attempts;
            if (attempts <= 2) throw BackendError("hiccup", true);
            return text_response("made it");
          }
          return text_response("fine");
        });
    Agent agent(backend, shared_library(), 16, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 1));
    CHECK(*reply == "made it");
    CHECK(attempts == 3);
  }
  SUBCASE("the retry budget is finite") {
    int attempts = 0;
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "response") {
            ++attempts;
            throw BackendError("still down", true);
          }
          return text_response("fine");
        });
    Agent agent(backend, shared_library(), 17, RetryPolicy{2, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 1));
    CHECK(*reply == "Skip");   // degraded after exhausting the budget
    CHECK(attempts == 3);      // 1 try + 2 retries
  }
  SUBCASE("non-retryable errors stop immediately") {
    int attempts = 0;
    auto backend = std::make_shared<ProgrammableBackend>(
        [&](const ChatRequest& request) -> ChatResponse {
          if (request.meta.at("op") == "response") {
            ++attempts;
            throw BackendError("rejected", false);
          }
          return text_response("fine");
        });
    Agent agent(backend, shared_library(), 18, RetryPolicy{5, 0});
    auto view = make_view(AgentId(1), Role::Villager, 1);
    agent.handle_packet(init_packet(view));
    auto reply = agent.handle_packet(talk_packet(view, 1));
    CHECK(*reply == "Skip");
    CHECK(attempts == 1);
  }
}
