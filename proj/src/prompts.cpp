#include "wolf/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "wolf/errors.hpp"

namespace wolf {

namespace {

// A slot marker is '[', an uppercase letter, at least one more character
// from [A-Z0-9_], then ']'. Hand-rolled rather than std::regex because
// render() sits on the hot path of every prompt assembly.
struct MarkerSpan {
  size_t pos = 0;
  size_t len = 0;
};

bool marker_tail_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::vector<MarkerSpan> scan_markers(const std::string& text) {
  std::vector<MarkerSpan> spans;
  const size_t n = text.size();
  size_t i = 0;
  while (i < n) {
    if (text[i] != '[') {
      ++i;
      continue;
    }
    size_t j = i + 1;
    if (j < n && text[j] >= 'A' && text[j] <= 'Z') {
      ++j;
      while (j < n && marker_tail_char(text[j])) ++j;
      if (j < n && text[j] == ']' && j - i >= 3) {  // at least two name chars
        spans.push_back({i, j - i + 1});
        i = j + 1;
        continue;
      }
    }
    ++i;
  }
  return spans;
}

std::vector<std::string> find_markers(const std::string& text) {
  std::vector<std::string> found;
  std::set<std::string> seen;
  for (const MarkerSpan& span : scan_markers(text)) {
    std::string marker = text.substr(span.pos, span.len);
    if (seen.insert(marker).second) found.push_back(std::move(marker));
  }
  return found;
}

std::string strip_edges(const std::string& text) {
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  size_t last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PromptError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

PromptTemplate::PromptTemplate(std::string body) : body_(std::move(body)) {
  slots_ = find_markers(body_);
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& bindings) const {
  std::set<std::string> slot_set(slots_.begin(), slots_.end());
  for (const auto& [key, _] : bindings) {
    if (!slot_set.count(key))
      throw PromptError("binding '" + key + "' matches no slot in the template");
  }
  for (const auto& slot : slots_) {
    if (!bindings.count(slot))
      throw PromptError("slot '" + slot + "' left unbound");
  }

  // Single pass over the body: bound values are spliced in but never
  // themselves rescanned for markers, so the leftover check below catches
  // markers smuggled in through a value.
  std::string out;
  out.reserve(body_.size());
  size_t last = 0;
  for (const MarkerSpan& span : scan_markers(body_)) {
    out.append(body_, last, span.pos - last);
    out += bindings.at(body_.substr(span.pos, span.len));
    last = span.pos + span.len;
  }
  out.append(body_, last, body_.size() - last);

  auto leftovers = find_markers(out);
  if (!leftovers.empty())
    throw PromptError("marker '" + leftovers.front() + "' survived rendering");
  return out;
}

std::string_view strategy_name(PersuasionStrategy s) {
  switch (s) {
    case PersuasionStrategy::Logical: return "Logical Appeal";
    case PersuasionStrategy::Credibility: return "Credibility Appeal";
    case PersuasionStrategy::Emotional: return "Emotional Appeal";
  }
  return "Logical Appeal";
}

std::string_view strategy_slug(PersuasionStrategy s) {
  switch (s) {
    case PersuasionStrategy::Logical: return "logical";
    case PersuasionStrategy::Credibility: return "credibility";
    case PersuasionStrategy::Emotional: return "emotional";
  }
  return "logical";
}

std::optional<PersuasionStrategy> parse_strategy_slug(std::string_view slug) {
  if (slug == "logical") return PersuasionStrategy::Logical;
  if (slug == "credibility") return PersuasionStrategy::Credibility;
  if (slug == "emotional") return PersuasionStrategy::Emotional;
  return std::nullopt;
}

std::optional<PersuasionStrategy> strategy_for_turn(int turn) {
  switch (turn) {
    case 3: return PersuasionStrategy::Logical;
    case 4: return PersuasionStrategy::Credibility;
    case 5: return PersuasionStrategy::Emotional;
    default: return std::nullopt;
  }
}

std::string ExampleBank::substituted(size_t index, AgentId target) const {
  if (index >= examples.size())
    throw PromptError("example index out of range");
  std::string out = examples[index];
  const std::string marker = "[VOTE_TARGET]";
  size_t pos = 0;
  while ((pos = out.find(marker, pos)) != std::string::npos) {
    out.replace(pos, marker.size(), target.label());
    pos += target.label().size();
  }
  return out;
}

std::string ExampleBank::joined(AgentId target) const {
  std::string out;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += substituted(i, target);
  }
  return out;
}

namespace {

constexpr const char* kRequiredTemplates[] = {
    "task_description",  "game_rules",          "analysis_plain",
    "analysis_divination", "analysis_werewolf", "response_plain",
    "response_divination", "persuasion",        "voting",
};

ExampleBank load_bank(const std::filesystem::path& path, PersuasionStrategy strategy) {
  ExampleBank bank;
  bank.strategy = strategy;
  std::string text = read_text_file(path);
  std::istringstream lines(text);
  std::string line;
  std::string current;
  auto flush = [&]() {
    std::string trimmed = strip_edges(current);
    if (!trimmed.empty()) bank.examples.push_back(std::move(trimmed));
    current.clear();
  };
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      flush();
    } else {
      current += line;
      current += '\n';
    }
  }
  flush();
  if (bank.examples.size() != 3)
    throw PromptError(path.string() + " must hold exactly three examples, found " +
                      std::to_string(bank.examples.size()));
  return bank;
}

}  // namespace

PromptLibrary PromptLibrary::load_from_dir(const std::filesystem::path& lang_dir) {
  PromptLibrary library;

  const auto prompts_dir = lang_dir / "prompts";
  if (!std::filesystem::is_directory(prompts_dir))
    throw PromptError("prompt directory missing: " + prompts_dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(prompts_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::string id = entry.path().stem().string();
    library.templates_[id] = PromptTemplate(strip_edges(read_text_file(entry.path())));
  }
  for (const char* id : kRequiredTemplates) {
    if (!library.templates_.count(id))
      throw PromptError("template '" + std::string(id) + "' missing from " +
                        prompts_dir.string());
  }

  const auto bank_dir = lang_dir / "persuasion";
  for (PersuasionStrategy s : {PersuasionStrategy::Logical, PersuasionStrategy::Credibility,
                               PersuasionStrategy::Emotional}) {
    const auto path = bank_dir / (std::string(strategy_slug(s)) + ".txt");
    if (!std::filesystem::is_regular_file(path))
      throw PromptError("persuasion bank missing: " + path.string());
    library.banks_[s] = load_bank(path, s);
  }
  return library;
}

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw PromptError("unknown template '" + id + "'");
  return it->second;
}

bool PromptLibrary::has(const std::string& id) const { return templates_.count(id) > 0; }

const ExampleBank& PromptLibrary::bank(PersuasionStrategy s) const {
  return banks_.at(s);
}

std::vector<std::string> PromptLibrary::template_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : templates_) ids.push_back(id);
  return ids;
}

std::string format_agent_list(const std::vector<AgentId>& agents) {
  if (agents.empty()) return "(none)";
  std::string out;
  for (size_t i = 0; i < agents.size(); ++i) {
    if (i > 0) out += ", ";
    out += agents[i].label();
  }
  return out;
}

std::string format_dialogue_history(const std::vector<TalkEntry>& entries) {
  if (entries.empty()) return "(no dialogue yet)";
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += '\n';
    out += "Day " + std::to_string(entries[i].day) + ", turn " +
           std::to_string(entries[i].turn) + ", " + entries[i].speaker.label() + ": " +
           entries[i].text;
  }
  return out;
}

std::string format_divination_sentence(const DivineRecord& record) {
  return "On the night of Day " + std::to_string(record.day) + ", I divined " +
         record.target.label() + ", and the result was " +
         std::string(species_name(record.result)) + ".";
}

std::string format_divination_block(const std::vector<DivineRecord>& records) {
  if (records.empty()) return "(no divination results yet)";
  std::string out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (i > 0) out += '\n';
    out += format_divination_sentence(records[i]);
  }
  return out;
}

}  // namespace wolf
