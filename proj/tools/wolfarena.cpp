#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wolf/agent.hpp"
#include "wolf/api_backend.hpp"
#include "wolf/channel.hpp"
#include "wolf/errors.hpp"
#include "wolf/game_log.hpp"
#include "wolf/paths.hpp"
#include "wolf/prompts.hpp"
#include "wolf/replay.hpp"
#include "wolf/scripted_backend.hpp"
#include "wolf/server.hpp"
#include "wolf/tournament.hpp"

namespace {

using namespace wolf;

// Options shared by every subcommand that assembles agents.
struct CommonOptions {
  std::string data_dir;  // empty: discover next to the binary
  std::string lang = "en";
  std::string backend_spec = "scripted";  // "scripted[:FILE]" or "api"
  std::string api_url;
  std::string api_key_env;
  std::string api_model = "gpt-4";
  int api_timeout_ms = 30000;
};

std::filesystem::path resolve_data_dir(const CommonOptions& options) {
  if (!options.data_dir.empty()) {
    std::filesystem::path dir(options.data_dir);
    if (!std::filesystem::is_directory(dir))
      throw DomainError("--data-dir is not a directory: " + options.data_dir);
    return dir;
  }
  return default_data_dir();
}

std::shared_ptr<const PromptLibrary> load_library(const CommonOptions& options) {
  const auto dir = language_dir(resolve_data_dir(options), options.lang);
  return std::make_shared<const PromptLibrary>(PromptLibrary::load_from_dir(dir));
}

// Parses "scripted", "scripted:path/to.json" or "api" into a factory of
// backends. Each scripted seat gets its own copy of the loaded script, so
// per-seat call recording cannot grow across an arbitrarily long run.
std::function<std::shared_ptr<ChatBackend>(AgentId)> make_backend_source(
    const CommonOptions& options) {
  const std::string& spec = options.backend_spec;
  if (spec == "api") {
    ApiConfig config;
    config.url = options.api_url;
    config.api_key_env = options.api_key_env;
    config.model = options.api_model;
    config.timeout_ms = options.api_timeout_ms;
    if (config.url.empty()) throw DomainError("api backend needs --api-url");
    auto backend = std::make_shared<ApiBackend>(config);
    return [backend](AgentId) { return backend; };
  }

  std::filesystem::path script_path;
  if (spec == "scripted") {
    script_path = resolve_data_dir(options) / "scripts" / "default.json";
  } else if (spec.rfind("scripted:", 0) == 0) {
    script_path = spec.substr(std::string("scripted:").size());
  } else {
    throw DomainError("unknown backend spec '" + spec +
                      "' (expected scripted, scripted:FILE or api)");
  }
  auto master = ScriptedBackend::load_file(script_path);
  return [master](AgentId) { return std::make_shared<ScriptedBackend>(*master); };
}

void add_common_options(CLI::App* cmd, CommonOptions& options, bool with_api) {
  cmd->add_option("--data-dir", options.data_dir,
                  "Data directory (default: discovered next to the binary)");
  cmd->add_option("--lang", options.lang, "Language pack name")->capture_default_str();
  cmd->add_option("--backend", options.backend_spec,
                  "Backend: scripted, scripted:FILE or api")
      ->capture_default_str();
  if (with_api) {
    cmd->add_option("--api-url", options.api_url, "Chat-completion endpoint URL");
    cmd->add_option("--api-key-env", options.api_key_env,
                    "Environment variable holding the bearer token");
    cmd->add_option("--model", options.api_model, "Model name sent to the endpoint")
        ->capture_default_str();
    cmd->add_option("--api-timeout-ms", options.api_timeout_ms, "HTTP timeout")
        ->capture_default_str();
  }
}

RotationPolicy parse_rotation_or_throw(const std::string& name) {
  auto policy = parse_rotation_policy(name);
  if (!policy) throw DomainError("unknown rotation policy '" + name + "'");
  return *policy;
}

std::vector<GameLog> read_log_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DomainError("log directory missing: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<GameLog> logs;
  logs.reserve(files.size());
  for (const auto& file : files) logs.push_back(read_game_log_file(file));
  return logs;
}

int cmd_play(const CommonOptions& options, uint64_t seed, int talk_turns,
             const std::string& rotation) {
  auto library = load_library(options);
  auto backend_source = make_backend_source(options);

  GameConfig config;
  config.talk_turns_per_day = talk_turns;
  config.rng_seed = seed;
  LocalGameParts parts = make_local_game(seed, library, backend_source);
  RoleAssignment assignment =
      rotated_assignment(parse_rotation_or_throw(rotation), 0, seed);
  GameLog log = run_game(config, std::move(parts.slots), assignment);
  std::cout << render_replay(log);
  return 0;
}

int cmd_tournament(const CommonOptions& options, int games, uint64_t seed,
                   int talk_turns, const std::string& rotation,
                   const std::string& log_dir, const std::string& label) {
  auto library = load_library(options);
  auto backend_source = make_backend_source(options);

  TournamentConfig config;
  config.games = games;
  config.seed = seed;
  config.rotation = parse_rotation_or_throw(rotation);
  config.game.talk_turns_per_day = talk_turns;
  config.log_dir = log_dir;
  TournamentResult result = run_tournament(
      config, library, [&](int, AgentId id) { return backend_source(id); });

  std::cout << "played " << result.games_played << " of " << config.games
            << " games";
  if (!config.log_dir.empty()) std::cout << ", logs in " << config.log_dir;
  std::cout << "\n\n";
  std::cout << render_rate_table(compute_win_rates(result.logs, label));
  if (result.games_aborted > 0) {
    std::cerr << "error: " << result.games_aborted << " game(s) aborted\n";
    return 1;
  }
  return 0;
}

int cmd_rates(const std::string& log_dir, const std::string& label) {
  std::vector<GameLog> logs = read_log_dir(log_dir);
  if (logs.empty()) {
    std::cout << "no logs found in " << log_dir << "\n";
    return 0;
  }
  std::cout << "scored " << logs.size() << " game(s)\n\n";
  std::cout << render_rate_table(compute_win_rates(logs, label));
  return 0;
}

int cmd_replay(const std::string& log_file) {
  GameLog log = read_game_log_file(log_file);
  ReplayCheck check = verify_replay(log);  // throws ReplayError on divergence
  std::cout << render_replay(log);
  std::cout << "replay verified: " << check.phase_trace.size()
            << " phase transitions\n";
  return 0;
}

int cmd_serve(uint64_t seed, int talk_turns, int port, int timeout_ms,
              const std::string& rotation, const std::string& log_dir) {
  auto [listen_fd, actual_port] = listen_on(static_cast<uint16_t>(port));
  // Progress lines flush immediately so a supervising process (or a human
  // watching through a pipe) sees them before the next blocking accept.
  std::cout << "listening on port " << actual_port << ", waiting for "
            << kNumAgents << " agents" << std::endl;

  std::vector<ConnectionSlot> slots;
  for (int i = 1; i <= kNumAgents; ++i) {
    int fd = accept_client(listen_fd, 600000);
    if (fd < 0) {
      ::close(listen_fd);
      std::cerr << "error: timed out waiting for agent " << i << "\n";
      return 1;
    }
    ConnectionSlot slot;
    slot.id = AgentId(i);
    slot.channel = std::make_shared<SocketChannel>(LineSocket(fd));
    slot.deadline_ms = timeout_ms;
    slots.push_back(std::move(slot));
    std::cout << "agent " << i << " connected" << std::endl;
  }
  ::close(listen_fd);

  GameConfig config;
  config.talk_turns_per_day = talk_turns;
  config.rng_seed = seed;
  RoleAssignment assignment =
      rotated_assignment(parse_rotation_or_throw(rotation), 0, seed);
  GameLog log = run_game(config, std::move(slots), assignment);
  if (!log_dir.empty()) {
    std::filesystem::create_directories(log_dir);
    write_game_log_file(log, std::filesystem::path(log_dir) / "game_00000.jsonl");
  }
  std::cout << render_replay(log);
  return 0;
}

int cmd_agent(const CommonOptions& options, const std::string& connect,
              uint64_t seed) {
  auto colon = connect.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == connect.size())
    throw DomainError("--connect expects HOST:PORT, got '" + connect + "'");
  const std::string host = connect.substr(0, colon);
  const int port = std::stoi(connect.substr(colon + 1));

  auto library = load_library(options);
  auto backend = make_backend_source(options)(AgentId(1));
  Agent agent(backend, library, seed);

  LineSocket socket = connect_to(host, static_cast<uint16_t>(port), 30000);
  std::cout << "connected to " << connect << std::endl;
  run_agent_over_socket(agent, socket);
  std::cout << "game over" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Five-player Werewolf arena: self-play server, agents and replay tools"};
  app.require_subcommand(1);

  CommonOptions common;
  uint64_t seed = 1;
  int talk_turns = 5;
  std::string rotation = "latin";
  std::string log_dir;
  std::string label = "self-play";

  auto* play = app.add_subcommand("play", "Run one self-play game and print the transcript");
  play->add_option("--seed", seed, "Game seed")->capture_default_str();
  play->add_option("--talk-turns", talk_turns, "Talk turns per day (min 5)")
      ->capture_default_str();
  play->add_option("--rotation", rotation, "Role rotation: latin or random")
      ->capture_default_str();
  add_common_options(play, common, true);

  int games = 40;
  auto* tournament =
      app.add_subcommand("tournament", "Run a seeded batch of self-play games");
  tournament->add_option("--games", games, "Number of games")->capture_default_str();
  tournament->add_option("--seed", seed, "Tournament seed")->capture_default_str();
  tournament->add_option("--talk-turns", talk_turns, "Talk turns per day (min 5)")
      ->capture_default_str();
  tournament->add_option("--rotation", rotation, "Role rotation: latin or random")
      ->capture_default_str();
  tournament->add_option("--log-dir", log_dir, "Directory for game_*.jsonl logs");
  tournament->add_option("--label", label, "Scoring label for the rate table")
      ->capture_default_str();
  add_common_options(tournament, common, true);

  std::string rates_dir;
  auto* rates = app.add_subcommand("rates", "Aggregate win rates from a log directory");
  rates->add_option("--logs", rates_dir, "Directory of game_*.jsonl logs")->required();
  rates->add_option("--label", label, "Scoring label for the rate table")
      ->capture_default_str();

  std::string log_file;
  auto* replay = app.add_subcommand("replay", "Verify a game log and print its transcript");
  replay->add_option("--log", log_file, "Path to a game_*.jsonl log")->required();

  int port = 0;
  int timeout_ms = 60000;
  auto* serve = app.add_subcommand("serve", "Host one game for five TCP agents");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")
      ->capture_default_str();
  serve->add_option("--seed", seed, "Game seed")->capture_default_str();
  serve->add_option("--talk-turns", talk_turns, "Talk turns per day (min 5)")
      ->capture_default_str();
  serve->add_option("--timeout-ms", timeout_ms, "Per-reply deadline")
      ->capture_default_str();
  serve->add_option("--rotation", rotation, "Role rotation: latin or random")
      ->capture_default_str();
  serve->add_option("--log-dir", log_dir, "Directory for the game log");

  std::string connect;
  auto* agent = app.add_subcommand("agent", "Join a served game over TCP");
  agent->add_option("--connect", connect, "HOST:PORT of the server")->required();
  agent->add_option("--seed", seed, "Agent seed")->capture_default_str();
  add_common_options(agent, common, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (play->parsed()) return cmd_play(common, seed, talk_turns, rotation);
    if (tournament->parsed())
      return cmd_tournament(common, games, seed, talk_turns, rotation, log_dir, label);
    if (rates->parsed()) return cmd_rates(rates_dir, label);
    if (replay->parsed()) return cmd_replay(log_file);
    if (serve->parsed())
      return cmd_serve(seed, talk_turns, port, timeout_ms, rotation, log_dir);
    if (agent->parsed()) return cmd_agent(common, connect, seed);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
