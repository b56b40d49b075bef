#include "wolf/channel.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "wolf/errors.hpp"

namespace wolf {

LocalChannel::LocalChannel(std::shared_ptr<Agent> agent, PacketTap tap)
    : agent_(std::move(agent)), tap_(std::move(tap)) {
  if (!agent_) throw DomainError("local channel needs an agent");
}

void LocalChannel::send(const Packet& packet) {
  if (dead_) return;
  std::optional<std::string> reply;
  try {
    reply = agent_->handle_packet(packet);
  } catch (...) {
    // A crashing agent looks like a dropped connection to the server.
    dead_ = true;
    pending_.reset();
    if (tap_) tap_(packet, std::nullopt);
    return;
  }
  if (tap_) tap_(packet, reply);
  pending_ = std::move(reply);
}

std::optional<std::string> LocalChannel::recv_line(int deadline_ms) {
  (void)deadline_ms;  // the in-process agent already answered or never will
  if (dead_) return std::nullopt;
  std::optional<std::string> out = std::move(pending_);
  pending_.reset();
  return out;
}

LineSocket::LineSocket(int fd) : fd_(fd) {
  if (fd_ < 0) throw DomainError("line socket needs a connected fd");
}

LineSocket::~LineSocket() {
  if (fd_ >= 0) ::close(fd_);
}

LineSocket::LineSocket(LineSocket&& other) noexcept
    : fd_(other.fd_), dead_(other.dead_), buffer_(std::move(other.buffer_)) {
  other.fd_ = -1;
}

LineSocket& LineSocket::operator=(LineSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    dead_ = other.dead_;
    buffer_ = std::move(other.buffer_);
    other.fd_ = -1;
  }
  return *this;
}

bool LineSocket::send_line(const std::string& line) {
  if (!alive()) return false;
  std::string framed = line;
  framed += '\n';
  size_t sent = 0;
  while (sent < framed.size()) {
    ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      dead_ = true;
      return false;
    }
    sent += static_cast<size_t>(n);
  }
  return true;
}

std::optional<std::string> LineSocket::recv_line(int deadline_ms) {
  if (!alive()) return std::nullopt;
  const auto started = std::chrono::steady_clock::now();
  for (;;) {
    size_t newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }

    int wait_ms = -1;
    if (deadline_ms >= 0) {
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - started)
                               .count();
      wait_ms = deadline_ms - static_cast<int>(elapsed);
      if (wait_ms < 0) return std::nullopt;
    }

    struct pollfd pfd{fd_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      dead_ = true;
      return std::nullopt;
    }
    if (ready == 0) return std::nullopt;  // deadline expired

    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      dead_ = true;
      return std::nullopt;
    }
    if (n == 0) {  // orderly shutdown; a partial line is not a line
      dead_ = true;
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

void SocketChannel::send(const Packet& packet) {
  if (!socket_.alive()) return;
  socket_.send_line(encode_packet(packet));
}

std::optional<std::string> SocketChannel::recv_line(int deadline_ms) {
  return socket_.recv_line(deadline_ms);
}

std::pair<int, uint16_t> listen_on(uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw DomainError(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    int saved = errno;
    ::close(fd);
    throw DomainError("bind to port " + std::to_string(port) + ": " + std::strerror(saved));
  }
  if (::listen(fd, 8) < 0) {
    int saved = errno;
    ::close(fd);
    throw DomainError(std::string("listen: ") + std::strerror(saved));
  }

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) < 0) {
    int saved = errno;
    ::close(fd);
    throw DomainError(std::string("getsockname: ") + std::strerror(saved));
  }
  return {fd, ntohs(bound.sin_port)};
}

int accept_client(int listen_fd, int timeout_ms) {
  struct pollfd pfd{listen_fd, POLLIN, 0};
  for (;;) {
    int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw DomainError(std::string("poll on listen socket: ") + std::strerror(errno));
    }
    if (ready == 0) return -1;
    int client = ::accept(listen_fd, nullptr, nullptr);
    if (client < 0) {
      if (errno == EINTR) continue;
      throw DomainError(std::string("accept: ") + std::strerror(errno));
    }
    return client;
  }
}

LineSocket connect_to(const std::string& host, uint16_t port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &results);
  if (rc != 0) throw DomainError("resolve " + host + ": " + gai_strerror(rc));

  int fd = -1;
  std::string last_error = "no addresses";
  for (addrinfo* it = results; it != nullptr; it = it->ai_next) {
    fd = ::socket(it->ai_family, it->ai_socktype, it->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    int crc = ::connect(fd, it->ai_addr, it->ai_addrlen);
    if (crc < 0 && errno == EINPROGRESS) {
      struct pollfd pfd{fd, POLLOUT, 0};
      int ready = ::poll(&pfd, 1, timeout_ms);
      int soerr = 0;
      socklen_t len = sizeof(soerr);
      if (ready > 0 && ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &soerr, &len) == 0 &&
          soerr == 0)
        crc = 0;
      else
        last_error = ready == 0 ? "connect timeout" : std::strerror(soerr ? soerr : errno);
    } else if (crc < 0) {
      last_error = std::strerror(errno);
    }
    if (crc == 0) {
      ::fcntl(fd, F_SETFL, flags);  // back to blocking
      break;
    }
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(results);
  if (fd < 0)
    throw DomainError("connect to " + host + ":" + std::to_string(port) + ": " + last_error);
  return LineSocket(fd);
}

void run_agent_over_socket(Agent& agent, LineSocket& socket) {
  for (;;) {
    auto line = socket.recv_line(-1);
    if (!line) return;  // peer gone
    if (line->empty()) continue;
    Packet packet = decode_packet(*line);
    auto reply = agent.handle_packet(packet);
    if (reply && !socket.send_line(*reply)) return;
    if (packet.request == RequestKind::Finish) return;
  }
}

}  // namespace wolf
