#pragma once

// Message transports for the lockstep session: an in-process pair (tests,
// local play) and TCP. Both carry encoded frames, so the codec is always on
// the path.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pixelarena/protocol.hpp"

namespace pixelarena {

class ChannelClosed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Channel {
public:
    using Clock = std::chrono::steady_clock;
    virtual ~Channel() = default;

    // Throws ChannelClosed when the peer is gone.
    virtual void send(const Message& m) = 0;
    // Next message, or nullopt once the deadline passes. Throws ChannelClosed
    // when the peer closed and nothing is left, ProtocolError on a bad stream.
    virtual std::optional<Message> receive_until(Clock::time_point deadline) = 0;
    virtual void close() = 0;
    virtual std::string peer() const = 0;

    std::optional<Message> receive(std::chrono::milliseconds timeout) { return receive_until(Clock::now() + timeout); }
    std::optional<Message> poll() { return receive_until(Clock::time_point::min()); }
};

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> memory_channel_pair();

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);

class TcpListener {
public:
    // Port 0 picks a free port.
    explicit TcpListener(std::uint16_t port, const std::string& address = "0.0.0.0");
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const;
    // nullptr on timeout.
    std::unique_ptr<Channel> accept(std::chrono::milliseconds timeout);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pixelarena
