#pragma once

// Random-but-valid wire packets for round-trip fuzzing, shared between the
// protocol suite and the acceptance gate.

#include <string>
#include <vector>

#include "wolf/packet.hpp"
#include "wolf/rng.hpp"

namespace wolf::testsupport {

inline std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "Agent[", "]", "Agent[0", "agent[01]", " the village ", "0", "1", "2",
      "5", "6", "9", "[", "Agent", "\"", "\\", " vote ", "12", "03", "00",
      "é", "skip", "newline\\n", "{", "}", ":"};
  std::string out;
  const int chunks = rng.uniform_int(0, 12);
  for (int i = 0; i < chunks; ++i)
    out += pieces[static_cast<size_t>(
        rng.uniform_int(0, static_cast<int>(pieces.size()) - 1))];
  return out;
}

// A structurally valid packet with randomized contents: statuses, talk
// entries with hostile text, seer-only divinations, optional kill markers,
// and a turn exactly when the request is a talk.
inline Packet random_packet(Rng& rng) {
  Packet packet;
  packet.request = static_cast<RequestKind>(rng.uniform_int(0, 6));

  GameInfoView& view = packet.game_info;
  view.day = rng.uniform_int(0, 2);
  view.phase = static_cast<PhaseKind>(rng.uniform_int(0, 6));
  view.receiver = AgentId(rng.uniform_int(1, 5));
  view.receiver_role = static_cast<Role>(rng.uniform_int(0, 3));
  for (AgentId id : all_agents())
    view.status_map[id] = static_cast<AgentStatus>(rng.uniform_int(0, 2));
  view.status_map[view.receiver] = AgentStatus::Alive;

  const int talks = rng.uniform_int(0, 8);
  for (int i = 0; i < talks; ++i) {
    TalkEntry entry;
    entry.day = rng.uniform_int(0, 2);
    entry.turn = rng.uniform_int(0, 5);
    entry.speaker = AgentId(rng.uniform_int(1, 5));
    entry.text = random_text(rng);
    if (entry.text.empty()) entry.text = "Skip";
    view.talk_list.push_back(std::move(entry));
  }

  if (view.receiver_role == Role::Seer) {
    const int divines = rng.uniform_int(0, 2);
    for (int i = 0; i < divines; ++i) {
      DivineRecord record;
      record.day = i;
      record.seer = view.receiver;
      record.target = AgentId(rng.uniform_int(1, 5));
      if (record.target == view.receiver)
        record.target = AgentId(view.receiver.index() % kNumAgents + 1);
      record.result = static_cast<Species>(rng.uniform_int(0, 1));
      view.divine_results.push_back(record);
    }
  }

  if (rng.uniform_int(0, 1)) view.executed = AgentId(rng.uniform_int(1, 5));
  if (rng.uniform_int(0, 1)) view.attacked = AgentId(rng.uniform_int(1, 5));

  if (packet.request == RequestKind::Talk) packet.turn = rng.uniform_int(0, 5);
  return packet;
}

}  // namespace wolf::testsupport
