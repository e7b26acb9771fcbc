#pragma once

// Deterministic fixed-timestep deathmatch simulation. One step() call is one
// 1/35 s tic; the result depends only on the world value and the actions.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pixelarena/constants.hpp"
#include "pixelarena/fixed.hpp"
#include "pixelarena/map_grid.hpp"

namespace pixelarena {

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Weapon : std::uint8_t { pistol = 1, rocket_launcher = 2 };

// Bit positions inside Action::buttons.
enum class ButtonBit : std::uint8_t {
    attack = 0,
    move_forward = 1,
    move_backward = 2,
    move_left = 3,
    move_right = 4,
    turn_left = 5,
    turn_right = 6,
    select_weapon_1 = 7,
    select_weapon_2 = 8,
};

// Reserved bit carrying an explicit respawn request from the controller.
inline constexpr std::uint32_t kRespawnRequestBit = 1u << 31;

struct Action {
    std::uint32_t buttons = 0;
    std::int16_t turn_delta = 0;  // hundredths of a degree, positive turns right

    constexpr bool pressed(ButtonBit b) const { return (buttons >> static_cast<int>(b)) & 1u; }
    constexpr Action& press(ButtonBit b) {
        buttons |= 1u << static_cast<int>(b);
        return *this;
    }
    friend constexpr bool operator==(Action, Action) = default;
};

struct Loadout {
    bool rocket_launcher = false;
    Weapon selected = Weapon::pistol;
    std::int32_t bullets = 50;
    std::int32_t rockets = 0;
    friend bool operator==(const Loadout&, const Loadout&) = default;
};

// Competition rules that vary between editions and scenarios.
struct MatchRules {
    std::uint32_t respawn_delay = 0;       // tics; 350 under the 2017 rules
    std::uint32_t spawn_protection = 70;   // tics
    bool auto_respawn = false;
    Loadout loadout;
    friend bool operator==(const MatchRules&, const MatchRules&) = default;
};

struct Actor {
    int id = 0;
    Vec2 pos;
    Angle angle;
    std::int32_t health = 0;
    std::int32_t armor = 0;
    bool has_rocket_launcher = false;
    Weapon selected = Weapon::pistol;
    std::int32_t bullets = 0;
    std::int32_t rockets = 0;
    bool alive = false;
    std::int32_t cooldown_tics = 0;
    std::uint32_t protection_until_tic = 0;
    std::uint32_t respawn_allowed_at_tic = 0;
    std::uint32_t death_tic = 0;
    std::int64_t life_distance_raw = 0;  // 16.16, 64-bit wide

    std::int32_t ammo_for(Weapon w) const { return w == Weapon::pistol ? bullets : rockets; }
};

struct Projectile {
    std::uint32_t id = 0;
    int owner = 0;
    Vec2 pos;
    Vec2 velocity;  // units per tic
    std::uint32_t attack_id = 0;
};

struct Item {
    std::uint32_t id = 0;
    ItemKind kind = ItemKind::medikit;
    CellPos cell;
    Vec2 pos;
    std::uint32_t respawn_at_tic = 0;  // 0 while present
    bool present() const { return respawn_at_tic == 0; }
};

struct Barrel {
    std::uint32_t id = 0;
    CellPos cell;
    Vec2 pos;
    std::int32_t health = 0;
    bool destroyed = false;
};

struct Counters {
    std::uint32_t kills = 0;
    std::uint32_t suicides = 0;
    std::uint32_t deaths = 0;
    std::uint32_t attacks = 0;
    std::uint32_t attacks_visible = 0;
    std::uint32_t attacks_damaging = 0;
    std::uint32_t hits_taken = 0;
    std::uint32_t damage_taken_hp = 0;
    std::uint32_t picked_ammo = 0;
    std::uint32_t picked_medikits = 0;
    std::uint32_t picked_armors = 0;
    std::uint32_t alive_tics = 0;
    std::int64_t distance_raw = 0;  // 16.16 units, 64-bit wide

    double distance_units() const { return static_cast<double>(distance_raw) / Fixed::kOne; }
    std::int64_t frags() const { return static_cast<std::int64_t>(kills) - suicides; }
    friend bool operator==(const Counters&, const Counters&) = default;
};

struct AttackEvent {
    int attacker = 0;
    std::uint32_t attack_id = 0;
    bool enemy_visible = false;
    Weapon weapon = Weapon::pistol;
    friend bool operator==(const AttackEvent&, const AttackEvent&) = default;
};
struct DamageEvent {
    std::optional<std::uint32_t> attack_id;
    std::optional<int> attacker;
    int victim = 0;
    std::int32_t amount = 0;  // before armor absorption
    friend bool operator==(const DamageEvent&, const DamageEvent&) = default;
};
struct DeathEvent {
    int victim = 0;
    std::optional<int> killer;  // == victim for self-inflicted deaths
    friend bool operator==(const DeathEvent&, const DeathEvent&) = default;
};
struct PickupEvent {
    int actor = 0;
    ItemKind kind = ItemKind::medikit;
    friend bool operator==(const PickupEvent&, const PickupEvent&) = default;
};
struct RespawnEvent {
    int actor = 0;
    friend bool operator==(const RespawnEvent&, const RespawnEvent&) = default;
};

using Event = std::variant<AttackEvent, DamageEvent, DeathEvent, PickupEvent, RespawnEvent>;

struct WorldState {
    std::uint32_t tic = 0;
    Rng rng;
    std::shared_ptr<const MapGrid> grid;
    SimConstants constants;
    MatchRules rules;
    std::vector<Actor> actors;  // index == id == player slot
    std::vector<Projectile> projectiles;
    std::vector<Item> items;
    std::vector<Barrel> barrels;
    std::vector<Vec2> spawn_points;
    std::vector<Counters> counters;  // index == actor id
    std::uint32_t next_entity_id = 0;
    std::uint32_t next_attack_id = 1;
    // Attacks already credited as damaging during the current tic.
    std::vector<std::uint32_t> damaging_attacks;

    // Per-player discovered cells for the automap; not part of the hash.
    bool track_discovery = false;
    std::vector<std::vector<std::uint8_t>> discovered;

    int player_count() const { return static_cast<int>(actors.size()); }
};

Vec2 cell_center(CellPos cell);
CellPos cell_of(Vec2 p);

// Builds a world with `players` actors placed by select_spawn in id order.
WorldState make_world(std::shared_ptr<const MapGrid> grid, int players, std::uint64_t seed, const MatchRules& rules = {},
                      const SimConstants& constants = {});

// Advances one tic. Throws ContractViolation if actions.size() != player_count().
std::vector<Event> step(WorldState& world, std::span<const Action> actions);

// Fires the selected weapon if the cooldown and ammo allow it. The visibility flag
// of the attack is computed on the current state.
std::vector<Event> fire_weapon(WorldState& world, int actor_id);

bool visibility_test(const WorldState& world, int observer_id, int target_id);
bool any_enemy_visible(const WorldState& world, int observer_id);

// Applies one damage instance; dropped (returns no events) during spawn protection.
std::vector<Event> resolve_damage(WorldState& world, const DamageEvent& damage);

// Index into world.spawn_points. Throws ConfigError when there are none.
std::size_t select_spawn(const WorldState& world, int respawning_id);

enum class RespawnResult { respawned, not_eligible };
RespawnResult respawn(WorldState& world, int actor_id, std::vector<Event>& events);
bool respawn_eligible(const WorldState& world, int actor_id);

// Marks the cells seen by the actor's view cone (64 rays over the FOV).
void update_discovery(WorldState& world, int actor_id);
inline constexpr int kDiscoveryRays = 64;

std::uint64_t state_hash(const WorldState& world);

}  // namespace pixelarena
