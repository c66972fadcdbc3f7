#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "ecot/runner.hpp"

// TCP byte channel: one session per connection, frames are the only wire
// unit, reads honor an idle timeout.

namespace ecot::run {

class SocketChannel : public ByteChannel {
public:
    explicit SocketChannel(int fd, int timeout_ms = 30000) : fd_(fd) { set_timeout(timeout_ms); }

    SocketChannel(const SocketChannel&) = delete;
    SocketChannel& operator=(const SocketChannel&) = delete;

    ~SocketChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void set_timeout(int timeout_ms) {
        timeval tv{};
        tv.tv_sec = timeout_ms / 1000;
        tv.tv_usec = (timeout_ms % 1000) * 1000;
        ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
        ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    }

    void send_frame(const std::vector<std::uint8_t>& frame) override {
        std::size_t sent = 0;
        while (sent < frame.size()) {
            ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                if (errno == EAGAIN || errno == EWOULDBLOCK) throw Timeout("send timed out");
                throw ConnectionLost(std::string("send: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::vector<std::uint8_t> recv_frame() override {
        std::vector<std::uint8_t> head(4);
        read_exact(head.data(), 4);
        std::size_t length = (std::size_t{head[0]} << 24) | (std::size_t{head[1]} << 16) |
                             (std::size_t{head[2]} << 8) | std::size_t{head[3]};
        if (length < 1 || length > wire::detail::kMaxFrame)
            throw TruncatedFrame("frame length out of range");
        std::vector<std::uint8_t> frame(4 + length);
        std::copy(head.begin(), head.end(), frame.begin());
        read_exact(frame.data() + 4, length);
        return frame;
    }

private:
    void read_exact(std::uint8_t* buf, std::size_t want) {
        std::size_t got = 0;
        while (got < want) {
            ssize_t n = ::recv(fd_, buf + got, want - got, 0);
            if (n == 0) throw ConnectionLost("peer closed the connection");
            if (n < 0) {
                if (errno == EINTR) continue;
                if (errno == EAGAIN || errno == EWOULDBLOCK) throw Timeout("recv timed out");
                throw ConnectionLost(std::string("recv: ") + std::strerror(errno));
            }
            got += static_cast<std::size_t>(n);
        }
    }

    int fd_;
};

namespace detail {

inline sockaddr_in resolve(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "*") {
        addr.sin_addr.s_addr = INADDR_ANY;
        return addr;
    }
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
    hostent* ent = ::gethostbyname(host.c_str());
    if (!ent || ent->h_addrtype != AF_INET)
        throw ConnectionLost("cannot resolve host " + host);
    std::memcpy(&addr.sin_addr, ent->h_addr_list[0], sizeof(addr.sin_addr));
    return addr;
}

}  // namespace detail

// Binds and listens on construction (so the port is known immediately, also
// with port 0), then accepts exactly one peer per call.
class Listener {
public:
    Listener(const std::string& host, std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw ConnectionLost(std::string("socket: ") + std::strerror(errno));
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        sockaddr_in addr = detail::resolve(host, port);
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
            int err = errno;
            ::close(fd_);
            throw ConnectionLost(std::string("bind: ") + std::strerror(err));
        }
        sockaddr_in actual{};
        socklen_t len = sizeof(actual);
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&actual), &len);
        port_ = ntohs(actual.sin_port);
        if (::listen(fd_, 1) < 0) {
            int err = errno;
            ::close(fd_);
            throw ConnectionLost(std::string("listen: ") + std::strerror(err));
        }
    }

    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener() {
        if (fd_ >= 0) ::close(fd_);
    }

    std::uint16_t port() const { return port_; }

    std::unique_ptr<SocketChannel> accept_one(int timeout_ms = 30000) {
        int fd;
        do {
            fd = ::accept(fd_, nullptr, nullptr);
        } while (fd < 0 && errno == EINTR);
        if (fd < 0) throw ConnectionLost(std::string("accept: ") + std::strerror(errno));
        return std::make_unique<SocketChannel>(fd, timeout_ms);
    }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Bind, accept a single peer, hand back the session channel.
inline std::unique_ptr<SocketChannel> listen_once(const std::string& host, std::uint16_t port,
                                                  int timeout_ms = 30000,
                                                  std::uint16_t* bound_port = nullptr) {
    Listener listener(host, port);
    if (bound_port) *bound_port = listener.port();
    return listener.accept_one(timeout_ms);
}

inline std::unique_ptr<SocketChannel> connect_to(const std::string& host, std::uint16_t port,
                                                 int timeout_ms = 30000) {
    sockaddr_in addr = detail::resolve(host, port);
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw ConnectionLost(std::string("socket: ") + std::strerror(errno));
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        int err = errno;
        ::close(fd);
        throw ConnectionLost(std::string("connect: ") + std::strerror(err));
    }
    return std::make_unique<SocketChannel>(fd, timeout_ms);
}

// One role of a scenario over an established TCP channel.
inline RoleResult run_socket(const SessionConfig& cfg, Role role, Scenario scenario,
                             ByteChannel& channel, Rng& rng, const ScenarioOptions& opts = {}) {
    return run_scenario_role(cfg, role, scenario, channel, rng, opts);
}

}  // namespace ecot::run
