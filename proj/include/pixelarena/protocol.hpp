#pragma once

// Lockstep wire protocol. Every frame is a u32 payload length (type byte not
// included), a u8 message type and the payload, all little-endian. The layouts
// are documented in docs/formats.md.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pixelarena/world.hpp"

namespace pixelarena {

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 5029;
inline constexpr std::uint16_t kDefaultBridgePort = 5030;
inline constexpr std::uint32_t kMaxPayload = 1u << 20;
inline constexpr std::size_t kFrameHeaderSize = 5;

enum class MsgType : std::uint8_t { hello = 1, welcome = 2, ready = 3, action = 4, ticbatch = 5, hash = 6, bye = 7 };

enum class ByeReason : std::uint8_t { normal = 0, full = 1, version = 2, desync = 3, protocol = 4, timeout = 5 };

struct HelloMsg {
    std::uint16_t proto = kProtocolVersion;
    std::string name;
    friend bool operator==(const HelloMsg&, const HelloMsg&) = default;
};
struct WelcomeMsg {
    std::uint8_t player_id = 0;
    std::uint64_t seed = 0;
    std::string config_text;  // without the map
    std::string map_text;
    friend bool operator==(const WelcomeMsg&, const WelcomeMsg&) = default;
};
struct ReadyMsg {
    friend bool operator==(const ReadyMsg&, const ReadyMsg&) = default;
};
struct ActionMsg {
    std::uint32_t tic = 0;
    Action action;
    friend bool operator==(const ActionMsg&, const ActionMsg&) = default;
};
struct TicBatchMsg {
    std::uint32_t tic = 0;
    std::vector<Action> actions;
    friend bool operator==(const TicBatchMsg&, const TicBatchMsg&) = default;
};
struct HashMsg {
    std::uint32_t tic = 0;  // world tic after stepping
    std::uint64_t hash = 0;
    friend bool operator==(const HashMsg&, const HashMsg&) = default;
};
struct ByeMsg {
    ByeReason reason = ByeReason::normal;
    friend bool operator==(const ByeMsg&, const ByeMsg&) = default;
};

using Message = std::variant<HelloMsg, WelcomeMsg, ReadyMsg, ActionMsg, TicBatchMsg, HashMsg, ByeMsg>;

MsgType type_of(const Message& m);
const char* to_string(MsgType t);
const char* to_string(ByeReason r);

class ProtocolError : public std::runtime_error {
public:
    enum class Code { truncated, bad_length, unknown_type, bad_payload, order };
    ProtocolError(Code code, const std::string& msg) : std::runtime_error(msg), code(code) {}
    Code code;
};

std::vector<std::uint8_t> encode(const Message& m);
// Decodes exactly one complete frame; trailing bytes are an error.
Message decode(std::span<const std::uint8_t> frame);
// Decodes the payload of a frame whose header was already read.
Message decode_payload(std::uint8_t type, std::span<const std::uint8_t> payload);

// Streaming decoder for a byte stream split at arbitrary points.
class FrameDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);
    // Next complete message, nullopt when more bytes are needed. Throws
    // ProtocolError on a malformed frame; the decoder is unusable afterwards.
    std::optional<Message> next();
    std::size_t buffered() const { return buf_.size() - pos_; }

private:
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    bool failed_ = false;
};

}  // namespace pixelarena
