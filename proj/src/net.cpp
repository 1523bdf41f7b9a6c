#include "oli/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <vector>

#include "oli/error.hpp"

namespace oli::comm {
namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(int err) { return std::strerror(err); }

struct AddrInfoList {
    addrinfo* head = nullptr;
    ~AddrInfoList() {
        if (head) freeaddrinfo(head);
    }
};

/// IPv4 candidates first; loopback names commonly resolve to both families.
std::vector<const addrinfo*> resolve_host(const Location& loc, bool passive, AddrInfoList& storage) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    std::string port = std::to_string(loc.port);
    const char* host = loc.host.empty() ? nullptr : loc.host.c_str();
    int rc = getaddrinfo(host, port.c_str(), &hints, &storage.head);
    if (rc != 0) throw LocationError("cannot resolve '" + loc.host + "': " + gai_strerror(rc));
    std::vector<const addrinfo*> out;
    for (auto* ai = storage.head; ai; ai = ai->ai_next) out.push_back(ai);
    std::stable_partition(out.begin(), out.end(), [](const addrinfo* ai) { return ai->ai_family == AF_INET; });
    return out;
}

int connect_to(const Location& where) {
    if (where.scheme != "socket") throw ConnectError("cannot connect to '" + where.str() + "'");
    AddrInfoList storage;
    std::vector<const addrinfo*> addrs;
    try {
        addrs = resolve_host(where, false, storage);
    } catch (const LocationError& e) {
        throw ConnectError(e.what());
    }
    int last_err = ECONNREFUSED;
    for (const auto* ai : addrs) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_err = errno;
            continue;
        }
        int rc;
        do {
            rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        } while (rc < 0 && errno == EINTR);
        if (rc == 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return fd;
        }
        last_err = errno;
        ::close(fd);
    }
    throw ConnectError("cannot connect to " + where.str() + ": " + errno_text(last_err));
}

} // namespace

// ---------------------------------------------------------------------------
// Location
// ---------------------------------------------------------------------------

std::string Location::str() const {
    if (is_local()) return "local://" + host;
    return scheme + "://" + host + ":" + std::to_string(port);
}

Location Location::parse(std::string_view uri) {
    auto sep = uri.find("://");
    if (sep == std::string_view::npos) throw LocationError("malformed location '" + std::string(uri) + "'");
    Location loc;
    loc.scheme = std::string(uri.substr(0, sep));
    auto rest = uri.substr(sep + 3);
    if (loc.scheme == "local") {
        if (rest.empty()) throw LocationError("local location needs a service name");
        loc.host = std::string(rest);
        return loc;
    }
    if (loc.scheme != "socket")
        throw LocationError("unsupported location scheme '" + loc.scheme + "' (expected socket://)");
    auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw LocationError("location '" + std::string(uri) + "' needs host:port");
    loc.host = std::string(rest.substr(0, colon));
    auto port_text = rest.substr(colon + 1);
    unsigned port = 0;
    auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || p != port_text.data() + port_text.size() || port > 65535)
        throw LocationError("bad port in location '" + std::string(uri) + "'");
    loc.port = static_cast<std::uint16_t>(port);
    return loc;
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

Channel::Channel(int fd, TraceFn trace) : fd_(fd), trace_(std::move(trace)) {}

Channel::~Channel() { ::close(fd_); }

void Channel::send(const Message& msg) {
    auto frame = encode_message(msg);
    std::lock_guard lock(write_mutex_);
    if (trace_) trace_(Direction::Out, msg, frame.size());
    write_all(frame);
}

void Channel::send_raw(std::span<const std::uint8_t> bytes) {
    std::lock_guard lock(write_mutex_);
    write_all(bytes);
}

void Channel::write_all(std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ConnectError("send failed: " + errno_text(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

void Channel::read_exact(std::uint8_t* out, std::size_t n, const Deadline* deadline) {
    std::size_t got = 0;
    while (got < n) {
        if (deadline) {
            auto now = Clock::now();
            if (now >= *deadline) throw TimeoutError("no reply within the timeout");
            // Round up so poll never wakes before the deadline.
            auto left = std::chrono::ceil<std::chrono::milliseconds>(*deadline - now);
            pollfd pfd{fd_, POLLIN, 0};
            int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
            if (rc < 0 && errno == EINTR) continue;
            if (rc < 0) throw ChannelClosed("poll failed: " + errno_text(errno));
            if (rc == 0) continue;
        }
        ssize_t r = ::recv(fd_, out + got, n - got, 0);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw ChannelClosed("receive failed: " + errno_text(errno));
        }
        if (r == 0) {
            if (got == 0) throw ChannelClosed("connection closed");
            throw DecodeError("connection closed in the middle of a frame");
        }
        got += static_cast<std::size_t>(r);
    }
}

Message Channel::receive_until(const Deadline* deadline) {
    std::array<std::uint8_t, kFrameHeaderSize> header{};
    read_exact(header.data(), header.size(), deadline);
    std::size_t n = read_frame_header(header);
    std::vector<std::uint8_t> frame(kFrameHeaderSize + n);
    std::copy(header.begin(), header.end(), frame.begin());
    try {
        read_exact(frame.data() + kFrameHeaderSize, n, deadline);
    } catch (const ChannelClosed&) {
        throw DecodeError("connection closed in the middle of a frame");
    }
    Message msg = decode_message(frame);
    if (trace_) trace_(Direction::In, msg, frame.size());
    return msg;
}

Message Channel::receive() { return receive_until(nullptr); }

Message Channel::receive(std::chrono::milliseconds timeout) {
    Deadline deadline = Clock::now() + timeout;
    return receive_until(&deadline);
}

void Channel::shutdown_read() { ::shutdown(fd_, SHUT_RD); }

void Channel::close() {
    if (!closed_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
}

// ---------------------------------------------------------------------------
// Listener
// ---------------------------------------------------------------------------

Listener::Listener(const Location& where, Handler handler, TraceFn trace)
    : where_(where), handler_(std::move(handler)), trace_(std::move(trace)) {
    if (where.scheme != "socket") throw BindError("cannot listen on '" + where.str() + "'");
    AddrInfoList storage;
    auto addrs = resolve_host(where, true, storage);
    int last_err = EADDRNOTAVAIL;
    for (const auto* ai : addrs) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_err = errno;
            continue;
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 128) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_err = errno;
        ::close(fd);
    }
    if (listen_fd_ < 0) throw BindError("cannot bind " + where.str() + ": " + errno_text(last_err));

    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6&>(bound).sin6_port
                                              : reinterpret_cast<sockaddr_in&>(bound).sin_port);

    if (::pipe2(wake_fd_, O_CLOEXEC) != 0) {
        ::close(listen_fd_);
        throw BindError("pipe: " + errno_text(errno));
    }
    acceptor_ = StackThread([this] { accept_loop(); }, 1u << 20);
}

Listener::~Listener() {
    shutdown();
    ::close(wake_fd_[0]);
    ::close(wake_fd_[1]);
}

Location Listener::location() const {
    Location loc = where_;
    loc.port = port_;
    return loc;
}

void Listener::accept_loop() {
    for (;;) {
        pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {wake_fd_[0], POLLIN, 0}};
        int rc = ::poll(fds, 2, 200);
        if (stopping_) return;
        reap_finished();
        if (rc <= 0 || !(fds[0].revents & POLLIN)) continue;
        int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

        auto channel = std::make_shared<Channel>(fd, trace_);
        auto done = std::make_shared<std::atomic<bool>>(false);
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        auto& conn = connections_.emplace_back();
        conn.channel = channel;
        conn.done = done;
        conn.thread = StackThread([this, channel, done] {
            try {
                handler_(channel);
            } catch (...) {
                // Handler failures only affect their own connection.
            }
            channel->close();
            done->store(true);
        });
    }
}

void Listener::reap_finished() {
    std::list<Connection> finished;
    {
        std::lock_guard lock(mutex_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            if (it->done->load()) {
                auto next = std::next(it);
                finished.splice(finished.end(), connections_, it);
                it = next;
            } else {
                ++it;
            }
        }
    }
    // Joined as `finished` goes out of scope.
}

void Listener::shutdown() {
    if (stopping_.exchange(true)) {
        acceptor_.join();
        return;
    }
    char b = 1;
    [[maybe_unused]] auto ignored = ::write(wake_fd_[1], &b, 1);
    acceptor_.join();
    ::close(listen_fd_);

    std::list<Connection> remaining;
    {
        std::lock_guard lock(mutex_);
        remaining.swap(connections_);
    }
    for (auto& conn : remaining)
        if (auto ch = conn.channel.lock()) ch->shutdown_read();
    remaining.clear();
}

// ---------------------------------------------------------------------------
// Client side
// ---------------------------------------------------------------------------

std::shared_ptr<Channel> connect(const Location& where, TraceFn trace) {
    return std::make_shared<Channel>(connect_to(where), std::move(trace));
}

Message solicit(const Location& where, const Message& msg, std::chrono::milliseconds timeout,
                const TraceFn& trace) {
    auto start = Clock::now();
    Channel ch(connect_to(where), trace);
    ch.send(msg);
    auto left = std::chrono::ceil<std::chrono::milliseconds>(timeout - (Clock::now() - start));
    try {
        return ch.receive(std::max(left, std::chrono::milliseconds(0)));
    } catch (const ChannelClosed& e) {
        throw ConnectError(std::string("connection closed before reply: ") + e.what());
    }
}

void notify(const Location& where, const Message& msg, const TraceFn& trace) {
    Channel ch(connect_to(where), trace);
    ch.send(msg);
}

} // namespace oli::comm
