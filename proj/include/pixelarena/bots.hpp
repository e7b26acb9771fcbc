#pragma once

// Scripted opponents used for training fill, tests and tournaments. They read
// the world directly; the static grid is used only for pathfinding.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pixelarena/world.hpp"

namespace pixelarena {

enum class BotKind : std::uint8_t { idle, wanderer, fighter };

struct BotSpec {
    BotKind kind = BotKind::idle;
    std::optional<std::uint64_t> seed;  // defaults to match seed + player id
};

// "idle", "wanderer", "fighter", optionally followed by ":seed".
BotSpec parse_bot_spec(std::string_view text);
std::string to_string(BotKind kind);

class Bot {
public:
    static constexpr std::int32_t kLowHealth = 30;

    Bot(BotKind kind, std::uint64_t seed);
    Bot(const BotSpec& spec, std::uint64_t match_seed, int player_id);

    Action act(const WorldState& world, int self);
    BotKind kind() const { return kind_; }

private:
    void plan_path(const WorldState& world, const Actor& me, bool to_medikit);
    Action follow_path(const WorldState& world, const Actor& me);

    BotKind kind_;
    Rng rng_;
    std::vector<CellPos> path_;  // next waypoint at the back
    bool fleeing_ = false;
    Vec2 last_pos_{};
    int stuck_tics_ = 0;
};

// Signed difference target - current in hundredths of a degree, in (-18000, 18000].
std::int32_t angle_error_centideg(Angle current, double target_rad);

}  // namespace pixelarena
