#include <algorithm>
#include <cstring>
#include <limits>

#include "pixelarena/grid_walk.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

Vec2 cell_center(CellPos cell) {
    return Vec2{Fixed::from_int(cell.x * kCellUnits + kCellUnits / 2), Fixed::from_int(cell.y * kCellUnits + kCellUnits / 2)};
}

CellPos cell_of(Vec2 p) { return CellPos{p.x.raw >> kCellShift, p.y.raw >> kCellShift}; }

namespace {

void give_loadout(Actor& actor, const Loadout& loadout) {
    actor.has_rocket_launcher = loadout.rocket_launcher;
    actor.selected = loadout.rocket_launcher ? loadout.selected : Weapon::pistol;
    actor.bullets = loadout.bullets;
    actor.rockets = loadout.rockets;
}

void place_actor(WorldState& world, Actor& actor) {
    const std::size_t spawn = select_spawn(world, actor.id);
    const auto& c = world.constants;
    actor.pos = world.spawn_points[spawn];
    actor.angle = Angle{};
    actor.health = c.max_health;
    actor.armor = 0;
    actor.alive = true;
    actor.cooldown_tics = 0;
    actor.life_distance_raw = 0;
    give_loadout(actor, world.rules.loadout);
}

}  // namespace

WorldState make_world(std::shared_ptr<const MapGrid> grid, int players, std::uint64_t seed, const MatchRules& rules,
                      const SimConstants& constants) {
    if (!grid) throw ConfigError("world requires a map");
    if (players < 1 || players > kMaxPlayers)
        throw ConfigError("player count must be within 1.." + std::to_string(kMaxPlayers));
    if (grid->spawns.empty()) throw ConfigError("map has no spawn point");

    WorldState world;
    world.rng = Rng(seed);
    world.grid = std::move(grid);
    world.constants = constants;
    world.rules = rules;
    for (const auto& s : world.grid->spawns) world.spawn_points.push_back(cell_center(s));
    world.counters.resize(static_cast<std::size_t>(players));
    world.next_entity_id = static_cast<std::uint32_t>(players);

    for (const auto& placement : world.grid->items) {
        Item item;
        item.id = world.next_entity_id++;
        item.kind = placement.kind;
        item.cell = placement.cell;
        item.pos = cell_center(placement.cell);
        world.items.push_back(item);
    }
    for (const auto& cell : world.grid->barrels) {
        Barrel barrel;
        barrel.id = world.next_entity_id++;
        barrel.cell = cell;
        barrel.pos = cell_center(cell);
        barrel.health = constants.barrel_health;
        world.barrels.push_back(barrel);
    }
    // Actors are placed one at a time so later players spawn away from earlier ones.
    world.actors.resize(static_cast<std::size_t>(players));
    for (int i = 0; i < players; ++i) world.actors[i].id = i;
    for (auto& actor : world.actors) place_actor(world, actor);
    return world;
}

std::size_t select_spawn(const WorldState& world, int respawning_id) {
    if (world.spawn_points.empty()) throw ConfigError("no spawn points");
    std::size_t best = 0;
    std::uint64_t best_score = 0;
    bool first = true;
    for (std::size_t i = 0; i < world.spawn_points.size(); ++i) {
        std::uint64_t nearest = std::numeric_limits<std::uint64_t>::max();
        for (const auto& other : world.actors) {
            if (other.id == respawning_id || !other.alive) continue;
            nearest = std::min(nearest, dist_sq_raw(world.spawn_points[i], other.pos));
        }
        if (first || nearest > best_score) {
            best = i;
            best_score = nearest;
            first = false;
        }
    }
    return best;
}

bool respawn_eligible(const WorldState& world, int actor_id) {
    const auto& actor = world.actors.at(static_cast<std::size_t>(actor_id));
    return !actor.alive && world.tic >= actor.respawn_allowed_at_tic;
}

RespawnResult respawn(WorldState& world, int actor_id, std::vector<Event>& events) {
    if (!respawn_eligible(world, actor_id)) return RespawnResult::not_eligible;
    auto& actor = world.actors[static_cast<std::size_t>(actor_id)];
    place_actor(world, actor);
    actor.protection_until_tic = world.tic + world.rules.spawn_protection;
    events.push_back(RespawnEvent{actor_id});
    return RespawnResult::respawned;
}

bool visibility_test(const WorldState& world, int observer_id, int target_id) {
    const auto& observer = world.actors.at(static_cast<std::size_t>(observer_id));
    const auto& target = world.actors.at(static_cast<std::size_t>(target_id));
    if (!target.alive || observer_id == target_id) return false;

    const std::int64_t dx = static_cast<std::int64_t>(target.pos.x.raw) - observer.pos.x.raw;
    const std::int64_t dy = static_cast<std::int64_t>(target.pos.y.raw) - observer.pos.y.raw;
    const std::int64_t c = fine_cosine(observer.angle).raw;
    const std::int64_t s = fine_sine(observer.angle).raw;
    const std::int64_t along = (dx * c + dy * s) >> 16;
    const std::int64_t across = (dy * c - dx * s) >> 16;
    if (along < 0) return false;
    // |across| / along <= tan(half_fov), cross-multiplied with table values.
    const std::int64_t hc = fine_cosine(world.constants.half_fov).raw;
    const std::int64_t hs = fine_sine(world.constants.half_fov).raw;
    const std::int64_t abs_across = across < 0 ? -across : across;
    if (abs_across * hc > along * hs) return false;
    return segment_clear(*world.grid, observer.pos, target.pos);
}

bool any_enemy_visible(const WorldState& world, int observer_id) {
    for (const auto& other : world.actors)
        if (other.id != observer_id && visibility_test(world, observer_id, other.id)) return true;
    return false;
}

void update_discovery(WorldState& world, int actor_id) {
    const auto& grid = *world.grid;
    const std::size_t cells = static_cast<std::size_t>(grid.width) * grid.height;
    if (world.discovered.size() != world.actors.size()) world.discovered.resize(world.actors.size());
    auto& seen = world.discovered[static_cast<std::size_t>(actor_id)];
    if (seen.size() != cells) seen.assign(cells, 0);

    const auto& actor = world.actors[static_cast<std::size_t>(actor_id)];
    if (!actor.alive) return;
    const std::int64_t half = world.constants.half_fov.bam;
    // Longer than the diagonal of the largest map.
    const Fixed reach = Fixed::from_int(170 * kCellUnits);
    for (int i = 0; i < kDiscoveryRays; ++i) {
        // Ray i is centered in its slice of the view cone.
        const std::int64_t offset = (2 * i + 1 - kDiscoveryRays) * half / kDiscoveryRays;
        const Angle a = actor.angle + Angle{static_cast<std::uint32_t>(offset)};
        const Vec2 end{actor.pos.x + fine_cosine(a) * reach, actor.pos.y + fine_sine(a) * reach};
        walk_segment(actor.pos, end, [&](int x, int y, std::uint32_t) {
            if (!grid.in_bounds(x, y)) return false;
            seen[static_cast<std::size_t>(y) * grid.width + x] = 1;
            return !grid.is_wall(x, y);
        });
    }
}

namespace {

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 1099511628211ull;
        }
    }
    template <class T>
    void le(T value) {
        using U = std::make_unsigned_t<T>;
        U u = static_cast<U>(value);
        unsigned char buf[sizeof(U)];
        for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
        bytes(buf, sizeof(U));
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace

std::uint64_t state_hash(const WorldState& world) {
    Fnv1a h;
    h.le(world.tic);
    h.le(world.rng.state());
    h.le(world.next_entity_id);
    h.le(world.next_attack_id);
    h.le(static_cast<std::uint32_t>(world.actors.size()));
    for (const auto& a : world.actors) {
        h.le(static_cast<std::int32_t>(a.id));
        h.le(a.pos.x.raw);
        h.le(a.pos.y.raw);
        h.le(a.angle.bam);
        h.le(a.health);
        h.le(a.armor);
        h.le(static_cast<std::uint8_t>(a.has_rocket_launcher));
        h.le(static_cast<std::uint8_t>(a.selected));
        h.le(a.bullets);
        h.le(a.rockets);
        h.le(static_cast<std::uint8_t>(a.alive));
        h.le(a.cooldown_tics);
        h.le(a.protection_until_tic);
        h.le(a.respawn_allowed_at_tic);
        h.le(a.death_tic);
        h.le(a.life_distance_raw);
    }
    h.le(static_cast<std::uint32_t>(world.projectiles.size()));
    for (const auto& p : world.projectiles) {
        h.le(p.id);
        h.le(static_cast<std::int32_t>(p.owner));
        h.le(p.pos.x.raw);
        h.le(p.pos.y.raw);
        h.le(p.velocity.x.raw);
        h.le(p.velocity.y.raw);
        h.le(p.attack_id);
    }
    h.le(static_cast<std::uint32_t>(world.items.size()));
    for (const auto& item : world.items) {
        h.le(item.id);
        h.le(static_cast<std::uint8_t>(item.kind));
        h.le(item.respawn_at_tic);
    }
    h.le(static_cast<std::uint32_t>(world.barrels.size()));
    for (const auto& b : world.barrels) {
        h.le(b.id);
        h.le(b.health);
        h.le(static_cast<std::uint8_t>(b.destroyed));
    }
    for (const auto& c : world.counters) {
        for (std::uint32_t v : {c.kills, c.suicides, c.deaths, c.attacks, c.attacks_visible, c.attacks_damaging, c.hits_taken,
                                c.damage_taken_hp, c.picked_ammo, c.picked_medikits, c.picked_armors, c.alive_tics})
            h.le(v);
        h.le(c.distance_raw);
    }
    return h.value();
}

}  // namespace pixelarena
