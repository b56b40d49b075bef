#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wolf/game_state.hpp"

namespace wolf {

// Text with [UPPER_SNAKE] slot markers. render() is strict in both
// directions: every marker needs a binding, every binding needs a marker,
// and no marker may survive into the rendered text (not even one smuggled
// in through a bound value).
class PromptTemplate {
 public:
  PromptTemplate() = default;
  explicit PromptTemplate(std::string body);

  const std::string& body() const { return body_; }
  const std::vector<std::string>& slots() const { return slots_; }  // unique, in order

  // Binding keys are the full markers, brackets included: {"[DAY]", "1"}.
  std::string render(const std::map<std::string, std::string>& bindings) const;

 private:
  std::string body_;
  std::vector<std::string> slots_;
};

enum class PersuasionStrategy { Logical, Credibility, Emotional };

std::string_view strategy_name(PersuasionStrategy s);  // "Logical Appeal", ...
std::string_view strategy_slug(PersuasionStrategy s);  // "logical", ...
std::optional<PersuasionStrategy> parse_strategy_slug(std::string_view slug);

// The fixed day schedule: turn 3 argues from logic, 4 from credibility,
// 5 from emotion. Other turns get no persuasion pass.
std::optional<PersuasionStrategy> strategy_for_turn(int turn);

// Three canned statements per strategy; [VOTE_TARGET] inside an example is
// replaced with the concrete target when used.
struct ExampleBank {
  PersuasionStrategy strategy = PersuasionStrategy::Logical;
  std::vector<std::string> examples;

  std::string substituted(size_t index, AgentId target) const;
  std::string joined(AgentId target) const;  // all examples, blank-line separated
};

// All templates and persuasion banks for one language pack, loaded from
//   <dir>/prompts/<id>.txt      (one template per file, id = stem)
//   <dir>/persuasion/<slug>.txt (three examples split by "---" lines)
class PromptLibrary {
 public:
  static PromptLibrary load_from_dir(const std::filesystem::path& lang_dir);

  const PromptTemplate& get(const std::string& id) const;  // throws PromptError
  bool has(const std::string& id) const;
  const ExampleBank& bank(PersuasionStrategy s) const;
  std::vector<std::string> template_ids() const;  // sorted

 private:
  std::map<std::string, PromptTemplate> templates_;
  std::map<PersuasionStrategy, ExampleBank> banks_;
};

// Rendering helpers shared by prompt assembly and transcripts.
std::string format_agent_list(const std::vector<AgentId>& agents);
std::string format_dialogue_history(const std::vector<TalkEntry>& entries);
std::string format_divination_sentence(const DivineRecord& record);
std::string format_divination_block(const std::vector<DivineRecord>& records);

}  // namespace wolf
