#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "wolf/agent.hpp"
#include "wolf/packet.hpp"

namespace wolf {

// Transport between the server and one agent. recv_line returns nullopt on
// deadline expiry or a dead peer; the server maps both to its fallback
// policy. send on a dead channel is a silent no-op.
class AgentChannel {
 public:
  virtual ~AgentChannel() = default;
  virtual void send(const Packet& packet) = 0;
  virtual std::optional<std::string> recv_line(int deadline_ms) = 0;
  virtual bool alive() const = 0;
};

// Observer hook for tests: sees every packet delivered through a
// LocalChannel together with the reply it produced.
using PacketTap =
    std::function<void(const Packet& packet, const std::optional<std::string>& reply)>;

// In-process channel: hands the structured packet straight to an Agent, no
// JSON on the path. Any exception out of the agent marks the channel dead,
// which the server then treats like a disconnected peer.
class LocalChannel : public AgentChannel {
 public:
  explicit LocalChannel(std::shared_ptr<Agent> agent, PacketTap tap = nullptr);

  void send(const Packet& packet) override;
  std::optional<std::string> recv_line(int deadline_ms) override;
  bool alive() const override { return !dead_; }

 private:
  std::shared_ptr<Agent> agent_;
  PacketTap tap_;
  std::optional<std::string> pending_;
  bool dead_ = false;
};

// Line-oriented wrapper over a connected POSIX socket. Owns the fd.
class LineSocket {
 public:
  explicit LineSocket(int fd);
  ~LineSocket();
  LineSocket(LineSocket&& other) noexcept;
  LineSocket& operator=(LineSocket&& other) noexcept;
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;

  // Appends '\n' and writes the whole line; false marks the socket dead.
  bool send_line(const std::string& line);

  // Next '\n'-terminated line, stripped of the terminator and any '\r'.
  // deadline_ms < 0 waits without limit. nullopt on timeout, EOF, or error.
  std::optional<std::string> recv_line(int deadline_ms);

  bool alive() const { return fd_ >= 0 && !dead_; }
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  bool dead_ = false;
  std::string buffer_;
};

// Wire channel: packets go out as encoded JSON lines.
class SocketChannel : public AgentChannel {
 public:
  explicit SocketChannel(LineSocket socket) : socket_(std::move(socket)) {}

  void send(const Packet& packet) override;
  std::optional<std::string> recv_line(int deadline_ms) override;
  bool alive() const override { return socket_.alive(); }

 private:
  LineSocket socket_;
};

// TCP plumbing. listen_on with port 0 binds an ephemeral port; the actual
// port comes back in the pair. All three throw DomainError on failure.
std::pair<int, uint16_t> listen_on(uint16_t port);
int accept_client(int listen_fd, int timeout_ms);  // -1 on timeout
LineSocket connect_to(const std::string& host, uint16_t port, int timeout_ms);

// Agent-side service loop: decode each incoming packet, let the agent
// handle it, write back the reply line when there is one. Returns after
// FINISH or when the peer goes away.
void run_agent_over_socket(Agent& agent, LineSocket& socket);

}  // namespace wolf
