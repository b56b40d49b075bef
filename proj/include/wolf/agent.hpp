#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wolf/backend.hpp"
#include "wolf/packet.hpp"
#include "wolf/prompts.hpp"
#include "wolf/rng.hpp"

namespace wolf {

// Retry schedule for backend calls: `retries` extra attempts after the
// first, sleeping backoff_base_ms * 2^attempt between them. A base of zero
// keeps the schedule but skips the sleeps (tests rely on this). Errors
// flagged non-retryable abort the schedule immediately.
struct RetryPolicy {
  int retries = 2;
  int backoff_base_ms = 250;
};

// The most recent situation-analysis completion, kept so later stages in
// the same request (and a failed refresh) can reuse it. vote_target is the
// last agent the analysis text named, kept only when it was a legal pick
// (alive and not the analyst) at the time of analysis.
struct SituationAnalysis {
  int day = 0;
  int turn = 0;
  std::string text;
  std::optional<AgentId> vote_target;

  bool operator==(const SituationAnalysis&) const = default;
};

// The werewolf's choice for one day, frozen at the first persuasion turn:
// the same agent is argued against on turns 3..5 and voted for at night.
// The schedule maps each persuasion turn to the appeal used on it.
struct PersuasionPlan {
  int day = 0;
  AgentId target;
  bool from_fallback = false;  // target drawn at random, not read from analysis
  std::map<int, PersuasionStrategy> schedule;

  bool operator==(const PersuasionPlan&) const = default;
};

// One player driven by a chat backend. The pipeline per request:
//   talk  -> situation analysis, then a response completion; werewolves on
//            day >= 1, turns 3..5 instead run the persuasion generator
//            against the day's frozen plan target
//   vote  -> non-werewolves run a fresh analysis plus a voting completion;
//            the werewolf votes its plan target with no backend calls
//   divine/attack -> no backend calls
// Backend failures degrade per stage instead of crashing the agent: an
// analysis failure reuses the previous analysis, a response failure talks
// "Skip", a persuasion failure recites the first bank example, and a voting
// failure picks a random legal target.
class Agent {
 public:
  Agent(std::shared_ptr<ChatBackend> backend,
        std::shared_ptr<const PromptLibrary> library, uint64_t seed,
        RetryPolicy retry = {});

  // Serves one packet; returns the reply line, or nullopt for the
  // notification kinds that take no reply.
  std::optional<std::string> handle_packet(const Packet& packet);

  AgentId self() const { return self_; }
  std::optional<Role> role() const { return role_; }
  const std::vector<PersuasionPlan>& plan_history() const { return plans_; }
  const std::optional<SituationAnalysis>& last_analysis() const { return analysis_; }
  const std::optional<DivineRecord>& fabricated_divination() const { return fabricated_; }

 private:
  void on_initialize(const GameInfoView& view);
  void on_daily_initialize(const GameInfoView& view);
  std::string on_talk(const GameInfoView& view, int turn);
  AgentId on_vote(const GameInfoView& view);
  AgentId on_divine(const GameInfoView& view);
  AgentId on_attack(const GameInfoView& view);

  SituationAnalysis& refresh_analysis(const GameInfoView& view, int turn);
  const PersuasionPlan& ensure_plan(const GameInfoView& view);
  std::string complete_with_retry(const ChatRequest& request);
  ChatRequest make_request(const GameInfoView& view, const std::string& op, int turn,
                           std::string user_text) const;
  std::map<std::string, std::string> base_bindings() const;
  std::string divination_block(const GameInfoView& view) const;
  std::vector<AgentId> alive_others(const GameInfoView& view) const;
  AgentId random_other(const GameInfoView& view);

  std::shared_ptr<ChatBackend> backend_;
  std::shared_ptr<const PromptLibrary> library_;
  Rng rng_;
  RetryPolicy retry_;

  RequestKind serving_ = RequestKind::Initialize;  // packet currently handled
  AgentId self_;
  std::optional<Role> role_;
  std::string task_text_;   // rendered once per game, spliced into every prompt
  std::string rules_text_;  // likewise; each completion is stateless
  std::optional<SituationAnalysis> analysis_;
  std::optional<PersuasionPlan> current_plan_;
  std::vector<PersuasionPlan> plans_;
  std::optional<DivineRecord> fabricated_;
};

// Squeezes a completion onto one line: newlines and tab runs become single
// spaces, edges are trimmed, and an empty result becomes "Skip".
std::string sanitize_talk_line(const std::string& text);

}  // namespace wolf
