#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pixelarena/bots.hpp"
#include "pixelarena/world.hpp"

namespace test {

using namespace pixelarena;

inline WorldState world_from(std::string_view map, int players, std::uint64_t seed = 1, const MatchRules& rules = {},
                             const SimConstants& constants = {}) {
    return make_world(std::make_shared<const MapGrid>(parse_map(map)), players, seed, rules, constants);
}

inline std::vector<Action> idle(const WorldState& w) { return std::vector<Action>(w.actors.size()); }

inline Action pressing(std::initializer_list<ButtonBit> bits) {
    Action a;
    for (auto b : bits) a.press(b);
    return a;
}

inline Vec2 at_units(double x, double y) {
    return Vec2{Fixed::from_raw(static_cast<std::int32_t>(x * Fixed::kOne)), Fixed::from_raw(static_cast<std::int32_t>(y * Fixed::kOne))};
}

inline void steps(WorldState& w, int n, const std::vector<Action>& actions) {
    for (int i = 0; i < n; ++i) step(w, actions);
}

// Long open corridor, one spawn at each end.
inline constexpr std::string_view kCorridor =
    "############\n"
    "#S........S#\n"
    "############\n";

// 3x3 floor room in the middle of a 5x5 grid.
inline constexpr std::string_view kRoom3 =
    "#####\n"
    "#...#\n"
    "#.S.#\n"
    "#...#\n"
    "#####\n";

// One controller per slot, each driving its own bot.
inline std::vector<std::function<Action(const WorldState&, int)>> bot_controllers(std::span<const BotKind> kinds,
                                                                                  std::uint64_t seed) {
    std::vector<std::function<Action(const WorldState&, int)>> out;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        auto bot = std::make_shared<Bot>(kinds[i], seed + i);
        out.emplace_back([bot](const WorldState& w, int slot) { return bot->act(w, slot); });
    }
    return out;
}

inline std::vector<std::string> slot_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
    return names;
}

}  // namespace test
