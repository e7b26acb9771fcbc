#pragma once

// WebSocket endpoint for browser spectators and human players. Text frames
// carry JSON control messages; binary frames carry one rendered buffer each,
// prefixed by a 16-byte header (tic u32, width u16, height u16, kind u8,
// format u8, 6 reserved bytes).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pixelarena/lockstep.hpp"
#include "pixelarena/render.hpp"

namespace pixelarena {

enum class BufferKind : std::uint8_t { screen = 0, depth = 1, labels = 2, automap = 3 };

inline constexpr std::size_t kBridgeHeaderSize = 16;

struct BridgeFrameHeader {
    std::uint32_t tic = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    BufferKind kind = BufferKind::screen;
    std::uint8_t format = 0;  // 0 RGB24, 1 GRAY8
};

std::vector<std::uint8_t> encode_bridge_frame(const BridgeFrameHeader& h, std::span<const std::uint8_t> pixels);
BridgeFrameHeader decode_bridge_header(std::span<const std::uint8_t> frame);

// Parses {"input": {"buttons": [...names...] or bitmask, "turn_delta": degrees}}.
// Throws std::invalid_argument on a malformed message.
Action parse_bridge_input(const std::string& json_text);

struct BridgeOptions {
    std::uint16_t port = kDefaultBridgePort;
    std::string address = "0.0.0.0";
    RenderOptions render;
    std::vector<int> player_slots;  // slots browsers may take over
};

class WsBridge {
public:
    explicit WsBridge(BridgeOptions options);
    ~WsBridge();
    WsBridge(const WsBridge&) = delete;
    WsBridge& operator=(const WsBridge&) = delete;

    std::uint16_t port() const;
    // Latest input of the browser player holding `slot`; empty action otherwise.
    SlotController controller(int slot);
    // Renders the world for every connected client and sends frames plus a scoreboard.
    void publish(const WorldState& world, std::span<const std::string> names);
    int client_count() const;
    int player_count() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace pixelarena
