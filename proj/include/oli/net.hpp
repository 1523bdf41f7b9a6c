#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <span>
#include <mutex>
#include <string>
#include <string_view>

#include "oli/codec.hpp"
#include "oli/stack_thread.hpp"

namespace oli::comm {

/// `socket://host:port`, or `local://name` for in-process services.
struct Location {
    std::string scheme;
    std::string host;
    std::uint16_t port = 0;

    bool is_local() const { return scheme == "local"; }
    std::string str() const;

    /// @throws LocationError
    static Location parse(std::string_view uri);
};

enum class Direction { In, Out };

/// Observer for every frame a channel sends or receives.
using TraceFn = std::function<void(Direction, const Message&, std::size_t frame_bytes)>;

/// One bidirectional MOP/1 stream. One reader and any number of writers may
/// use a channel concurrently.
class Channel {
public:
    explicit Channel(int fd, TraceFn trace = {});
    ~Channel();

    Channel(const Channel&) = delete;
    Channel& operator=(const Channel&) = delete;

    void send(const Message& msg);
    /// Writes bytes as they are, bypassing the codec.
    void send_raw(std::span<const std::uint8_t> bytes);

    /// Blocks for the next message.
    /// @throws ChannelClosed on end of stream, DecodeError on a bad frame.
    Message receive();

    /// Like receive() but gives up once `timeout` elapses.
    /// @throws TimeoutError
    Message receive(std::chrono::milliseconds timeout);

    /// Makes a blocked or future receive() see end of stream; sending still works.
    void shutdown_read();
    void close();

private:
    using Deadline = std::chrono::steady_clock::time_point;
    Message receive_until(const Deadline* deadline);
    void write_all(std::span<const std::uint8_t> bytes);
    void read_exact(std::uint8_t* out, std::size_t n, const Deadline* deadline);

    int fd_;
    TraceFn trace_;
    std::mutex write_mutex_;
    std::atomic<bool> closed_{false};
};

/// Accepts connections on a socket location and runs `handler` for each on
/// its own thread.
class Listener {
public:
    using Handler = std::function<void(std::shared_ptr<Channel>)>;

    /// @throws BindError, LocationError
    Listener(const Location& where, Handler handler, TraceFn trace = {});
    ~Listener();

    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    Location location() const;

    /// Stops accepting, ends reads on open connections and waits for every
    /// handler to return. Idempotent.
    void shutdown();

private:
    void accept_loop();
    void reap_finished();

    struct Connection {
        std::weak_ptr<Channel> channel;
        StackThread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };

    Location where_;
    Handler handler_;
    TraceFn trace_;
    int listen_fd_ = -1;
    int wake_fd_[2] = {-1, -1};
    std::uint16_t port_ = 0;
    std::mutex mutex_;
    std::list<Connection> connections_;
    std::atomic<bool> stopping_{false};
    StackThread acceptor_;
};

/// Opens a channel to a socket location.
/// @throws ConnectError
std::shared_ptr<Channel> connect(const Location& where, TraceFn trace = {});

/// Sends `msg` and blocks for exactly one reply.
/// @throws ConnectError, TimeoutError, DecodeError
Message solicit(const Location& where, const Message& msg, std::chrono::milliseconds timeout,
                const TraceFn& trace = {});

/// Fire-and-forget send of one frame.
/// @throws ConnectError
void notify(const Location& where, const Message& msg, const TraceFn& trace = {});

} // namespace oli::comm
