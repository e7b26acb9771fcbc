#pragma once

// Scenario configuration: the declarative replacement for scripted scenarios.
// Text format is `key = value` lines, `#` comments and `{ ... }` lists; see
// docs/formats.md for the grammar.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pixelarena/map_grid.hpp"
#include "pixelarena/render_options.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

enum class Mode : std::uint8_t { sync_player, sync_spectator, async_player, async_spectator };

enum class Button : std::uint8_t {
    attack,
    move_forward,
    move_backward,
    move_left,
    move_right,
    turn_left,
    turn_right,
    select_weapon_1,
    select_weapon_2,
    turn_delta,
};
inline constexpr int kButtonCount = 10;

enum class GameVariable : std::uint8_t {
    health,
    armor,
    selected_weapon,
    selected_weapon_ammo,
    fragcount,
    killcount,
    deathcount,
    hits_taken,
    damage_taken,
    itemcount,
    position_x,
    position_y,
    angle,
};
inline constexpr int kGameVariableCount = 13;

std::string_view to_string(Mode m);
std::string_view to_string(Button b);
std::string_view to_string(GameVariable v);
std::optional<Mode> mode_from_string(std::string_view s);
std::optional<Button> button_from_string(std::string_view s);
std::optional<GameVariable> game_variable_from_string(std::string_view s);

inline bool is_spectator(Mode m) { return m == Mode::sync_spectator || m == Mode::async_spectator; }
inline bool is_async(Mode m) { return m == Mode::async_player || m == Mode::async_spectator; }

struct Rewards {
    double living_reward = 0;
    double death_penalty = 0;
    double kill_reward = 0;
    double suicide_penalty = 0;
    double item_reward = 0;
    double damage_taken_penalty = 0;     // per hp
    double damage_inflicted_reward = 0;  // per hp
    friend bool operator==(const Rewards&, const Rewards&) = default;
};

struct ScenarioConfig {
    std::string map_text;
    Mode mode = Mode::sync_player;
    RenderOptions render;
    std::vector<Button> available_buttons;
    std::vector<GameVariable> available_game_variables;
    Rewards rewards;
    std::uint32_t episode_timeout = 0;  // tics, 0 = none
    std::uint32_t frag_limit = 0;       // 0 = none
    bool episode_ends_on_death = false;
    std::uint32_t respawn_delay = 0;
    std::uint32_t spawn_protection = 70;
    bool auto_respawn = false;
    Weapon start_weapon = Weapon::pistol;
    std::int32_t start_bullets = 50;
    std::int32_t start_rockets = 0;
    std::uint64_t seed = 0;
    int players = 1;
    std::vector<std::string> bots;  // bot specs for local slots 1..players-1
    std::vector<std::string> args;  // engine-style arguments, e.g. "+name" "RandomBot"

    MatchRules rules() const;
    // Value following "+name" in args, or "player".
    std::string player_name() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ConfigParseOptions {
    std::filesystem::path base_dir;          // resolves `map = relative/path`
    std::optional<std::string> map_text;     // supplies the map when the text has none
};

ScenarioConfig parse_config(std::string_view text, const ConfigParseOptions& options = {});
ScenarioConfig load_config(const std::filesystem::path& path);
// Canonical text; with include_map the map is written as a map_inline block.
std::string serialize_config(const ScenarioConfig& config, bool include_map = true);
// Throws ConfigError when an invariant does not hold.
void validate(const ScenarioConfig& config);

// A small deathmatch arena usable without any files.
std::string_view default_config_text();
ScenarioConfig default_config();

// Reward earned by `player` for the events of one tic.
double reward_for(std::span<const Event> events, const ScenarioConfig& config, int player);

}  // namespace pixelarena
