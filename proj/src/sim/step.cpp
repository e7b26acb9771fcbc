#include <algorithm>
#include <deque>

#include "pixelarena/grid_walk.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

namespace {

constexpr std::int64_t kCellRaw = std::int64_t{1} << kCellShift;
constexpr std::uint32_t kFullFraction = 1u << 16;

void append(std::vector<Event>& out, std::vector<Event>&& more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

struct Explosion {
    Vec2 center;
    std::optional<int> attacker;
    std::optional<std::uint32_t> attack_id;
    std::optional<int> direct_victim;
};

std::int32_t blast_amount(const SimConstants& c, std::int64_t dist_raw) {
    const std::int64_t r = c.blast_radius.raw;
    if (dist_raw >= r) return 0;
    return static_cast<std::int32_t>(static_cast<std::int64_t>(c.blast_damage) * (r - dist_raw) / r);
}

void damage_barrel(Barrel& barrel, std::int32_t amount, const std::optional<int>& attacker,
                   const std::optional<std::uint32_t>& attack_id, std::deque<Explosion>& queue) {
    if (barrel.destroyed || amount <= 0) return;
    barrel.health -= amount;
    if (barrel.health <= 0) {
        barrel.health = 0;
        barrel.destroyed = true;
        // Chains keep the original destroyer and attack.
        queue.push_back(Explosion{barrel.pos, attacker, attack_id, std::nullopt});
    }
}

void run_explosions(WorldState& world, std::deque<Explosion> queue, std::vector<Event>& events) {
    const auto& c = world.constants;
    while (!queue.empty()) {
        const Explosion e = queue.front();
        queue.pop_front();
        for (auto& actor : world.actors) {
            if (!actor.alive) continue;
            const bool direct = e.direct_victim == actor.id;
            std::int32_t amount = blast_amount(c, distance_raw(e.center, actor.pos));
            if (direct) amount += c.rocket_direct_damage;
            if (amount <= 0) continue;
            if (!direct && !segment_clear(*world.grid, e.center, actor.pos)) continue;
            append(events, resolve_damage(world, DamageEvent{e.attack_id, e.attacker, actor.id, amount}));
        }
        for (auto& barrel : world.barrels) {
            if (barrel.destroyed) continue;
            const std::int32_t amount = blast_amount(c, distance_raw(e.center, barrel.pos));
            if (amount <= 0 || !segment_clear(*world.grid, e.center, barrel.pos)) continue;
            damage_barrel(barrel, amount, e.attacker, e.attack_id, queue);
        }
    }
}

// 16.16 fraction along p0 -> p0 + v where the segment first touches the circle,
// computed in 1/256-unit integers.
std::optional<std::uint32_t> circle_entry(Vec2 p0, Vec2 v, Vec2 center, Fixed radius) {
    const std::int64_t px = (static_cast<std::int64_t>(center.x.raw) - p0.x.raw) >> 8;
    const std::int64_t py = (static_cast<std::int64_t>(center.y.raw) - p0.y.raw) >> 8;
    const std::int64_t vx = static_cast<std::int64_t>(v.x.raw) >> 8;
    const std::int64_t vy = static_cast<std::int64_t>(v.y.raw) >> 8;
    const std::int64_t r = radius.raw >> 8;
    const std::int64_t reach_x = (vx < 0 ? -vx : vx) + r + 256;
    const std::int64_t reach_y = (vy < 0 ? -vy : vy) + r + 256;
    if (px > reach_x || -px > reach_x || py > reach_y || -py > reach_y) return std::nullopt;

    const std::int64_t cc = px * px + py * py - r * r;
    if (cc <= 0) return 0u;
    const std::int64_t b = px * vx + py * vy;
    const std::int64_t a = vx * vx + vy * vy;
    if (b <= 0 || a == 0) return std::nullopt;
    const std::int64_t disc = b * b - a * cc;
    if (disc < 0) return std::nullopt;
    const std::int64_t t_num = b - static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(disc)));
    const std::int64_t t = (t_num << 16) / a;
    if (t > kFullFraction) return std::nullopt;
    return static_cast<std::uint32_t>(t < 0 ? 0 : t);
}

Vec2 lerp(Vec2 p0, Vec2 v, std::uint32_t fraction) {
    return Vec2{Fixed::from_raw(p0.x.raw + static_cast<std::int32_t>(static_cast<std::int64_t>(v.x.raw) * fraction / kFullFraction)),
                Fixed::from_raw(p0.y.raw + static_cast<std::int32_t>(static_cast<std::int64_t>(v.y.raw) * fraction / kFullFraction))};
}

void fire_hitscan(WorldState& world, Actor& shooter, std::uint32_t attack_id, std::vector<Event>& events) {
    const auto& c = world.constants;
    const std::uint32_t spread_span = 2 * c.pistol_spread.bam + 1;
    const std::uint32_t spread = world.rng.below(spread_span) - c.pistol_spread.bam;
    const Angle aim = shooter.angle + Angle{spread};
    const std::int64_t cs = fine_cosine(aim).raw;
    const std::int64_t sn = fine_sine(aim).raw;
    const Vec2 end{shooter.pos.x + fine_cosine(aim) * c.hitscan_range, shooter.pos.y + fine_sine(aim) * c.hitscan_range};

    std::int64_t best = c.hitscan_range.raw;
    if (auto wall = first_wall_fraction(*world.grid, shooter.pos, end))
        best = static_cast<std::int64_t>(c.hitscan_range.raw) * *wall / kFullFraction;

    auto along_ray = [&](Vec2 target, Fixed radius) -> std::optional<std::int64_t> {
        const std::int64_t dx = static_cast<std::int64_t>(target.x.raw) - shooter.pos.x.raw;
        const std::int64_t dy = static_cast<std::int64_t>(target.y.raw) - shooter.pos.y.raw;
        const std::int64_t along = (dx * cs + dy * sn) >> 16;
        const std::int64_t across = (dy * cs - dx * sn) >> 16;
        if (along <= 0 || (across < 0 ? -across : across) >= radius.raw) return std::nullopt;
        return along;
    };

    int hit_actor = -1;
    Barrel* hit_barrel = nullptr;
    for (auto& other : world.actors) {
        if (!other.alive || other.id == shooter.id) continue;
        if (auto d = along_ray(other.pos, c.actor_radius); d && *d < best) {
            best = *d;
            hit_actor = other.id;
        }
    }
    for (auto& barrel : world.barrels) {
        if (barrel.destroyed) continue;
        if (auto d = along_ray(barrel.pos, c.barrel_radius); d && *d < best) {
            best = *d;
            hit_actor = -1;
            hit_barrel = &barrel;
        }
    }
    if (hit_actor < 0 && !hit_barrel) return;

    const std::int32_t amount = c.pistol_damage_unit * static_cast<std::int32_t>(1 + world.rng.below(3));
    if (hit_actor >= 0) {
        append(events, resolve_damage(world, DamageEvent{attack_id, shooter.id, hit_actor, amount}));
    } else {
        std::deque<Explosion> queue;
        damage_barrel(*hit_barrel, amount, shooter.id, attack_id, queue);
        run_explosions(world, std::move(queue), events);
    }
}

void fire(WorldState& world, int actor_id, bool enemy_visible, std::vector<Event>& events) {
    auto& actor = world.actors[static_cast<std::size_t>(actor_id)];
    const auto& c = world.constants;
    if (!actor.alive || actor.cooldown_tics > 0 || actor.ammo_for(actor.selected) <= 0) return;

    const std::uint32_t attack_id = world.next_attack_id++;
    auto& counters = world.counters[static_cast<std::size_t>(actor_id)];
    ++counters.attacks;
    if (enemy_visible) ++counters.attacks_visible;
    events.push_back(AttackEvent{actor_id, attack_id, enemy_visible, actor.selected});

    if (actor.selected == Weapon::pistol) {
        --actor.bullets;
        actor.cooldown_tics = c.pistol_cooldown;
        fire_hitscan(world, actor, attack_id, events);
    } else {
        --actor.rockets;
        actor.cooldown_tics = c.rocket_cooldown;
        Projectile rocket;
        rocket.id = world.next_entity_id++;
        rocket.owner = actor_id;
        rocket.pos = actor.pos;
        rocket.velocity = Vec2{fine_cosine(actor.angle) * c.rocket_speed, fine_sine(actor.angle) * c.rocket_speed};
        rocket.attack_id = attack_id;
        world.projectiles.push_back(rocket);
    }
}

// Moves along one axis, clamped against wall cells inflated by the actor radius.
// Moves that would bring the actor deeper into another body are rejected.
Vec2 move_axis(const WorldState& world, const Actor& actor, Vec2 from, Fixed delta, bool x_axis) {
    if (delta.raw == 0) return from;
    const auto& grid = *world.grid;
    const std::int64_t r = world.constants.actor_radius.raw;
    const std::int64_t old_coord = x_axis ? from.x.raw : from.y.raw;
    std::int64_t coord = old_coord + delta.raw;
    const std::int64_t other = x_axis ? from.y.raw : from.x.raw;

    const int o0 = static_cast<int>((other - r) >> kCellShift);
    const int o1 = static_cast<int>((other + r - 1) >> kCellShift);
    const int m0 = static_cast<int>((coord - r) >> kCellShift);
    const int m1 = static_cast<int>((coord + r - 1) >> kCellShift);
    for (int m = m0; m <= m1; ++m) {
        for (int o = o0; o <= o1; ++o) {
            const bool wall = x_axis ? grid.is_wall(m, o) : grid.is_wall(o, m);
            if (!wall) continue;
            if (delta.raw > 0) coord = std::min(coord, m * kCellRaw - r);
            else coord = std::max(coord, (m + 1) * kCellRaw + r);
        }
    }
    coord = delta.raw > 0 ? std::max(coord, old_coord) : std::min(coord, old_coord);

    Vec2 to = from;
    (x_axis ? to.x : to.y) = Fixed::from_raw(static_cast<std::int32_t>(coord));
    if (to == from) return from;

    auto blocked_by = [&](Vec2 center, std::int64_t reach) {
        const std::uint64_t limit = static_cast<std::uint64_t>(reach * reach);
        const std::uint64_t d_new = dist_sq_raw(to, center);
        return d_new < limit && d_new < dist_sq_raw(from, center);
    };
    for (const auto& o : world.actors)
        if (o.alive && o.id != actor.id && blocked_by(o.pos, 2 * r)) return from;
    for (const auto& b : world.barrels)
        if (!b.destroyed && blocked_by(b.pos, r + world.constants.barrel_radius.raw)) return from;
    return to;
}

void apply_input(WorldState& world, Actor& actor, const Action& action, bool enemy_visible, std::vector<Event>& events) {
    const auto& c = world.constants;
    std::int64_t turn = 0;
    if (action.pressed(ButtonBit::turn_left)) turn -= c.turn_step.bam;
    if (action.pressed(ButtonBit::turn_right)) turn += c.turn_step.bam;
    const std::int32_t delta = std::clamp<std::int32_t>(action.turn_delta, -c.max_turn_centideg, c.max_turn_centideg);
    turn += Angle::centidegrees_to_bam_delta(delta);
    actor.angle += Angle{static_cast<std::uint32_t>(turn)};

    if (action.pressed(ButtonBit::select_weapon_1)) actor.selected = Weapon::pistol;
    if (action.pressed(ButtonBit::select_weapon_2) && actor.has_rocket_launcher) actor.selected = Weapon::rocket_launcher;

    if (actor.cooldown_tics > 0) --actor.cooldown_tics;
    if (action.pressed(ButtonBit::attack)) fire(world, actor.id, enemy_visible, events);
    if (!actor.alive) return;  // own point-blank blast

    Fixed forward{}, strafe{};
    const bool fwd = action.pressed(ButtonBit::move_forward), back = action.pressed(ButtonBit::move_backward);
    const bool left = action.pressed(ButtonBit::move_left), right = action.pressed(ButtonBit::move_right);
    if (fwd && !back) forward = c.forward_speed;
    if (back && !fwd) forward = -c.backward_speed;
    if (right && !left) strafe = c.strafe_speed;
    if (left && !right) strafe = -c.strafe_speed;
    if (forward.raw == 0 && strafe.raw == 0) return;

    const Fixed cs = fine_cosine(actor.angle), sn = fine_sine(actor.angle);
    // Right of the view direction (cos, sin) is (-sin, cos) with y growing downward.
    const Fixed mx = cs * forward - sn * strafe;
    const Fixed my = sn * forward + cs * strafe;
    const Vec2 start = actor.pos;
    Vec2 pos = move_axis(world, actor, start, mx, true);
    pos = move_axis(world, actor, pos, my, false);
    actor.pos = pos;
    const std::int64_t moved = distance_raw(start, pos);
    actor.life_distance_raw += moved;
    world.counters[static_cast<std::size_t>(actor.id)].distance_raw += moved;
}

void advance_projectiles(WorldState& world, std::vector<Event>& events) {
    const auto& c = world.constants;
    const std::uint32_t wall_backoff =
        static_cast<std::uint32_t>(static_cast<std::int64_t>(Fixed::kOne) * kFullFraction / std::max(1, c.rocket_speed.raw));
    std::size_t i = 0;
    while (i < world.projectiles.size()) {
        Projectile p = world.projectiles[i];
        const Vec2 end{p.pos.x + p.velocity.x, p.pos.y + p.velocity.y};
        std::uint32_t best = kFullFraction + 1;
        bool hit_wall = false;
        std::optional<int> direct;
        if (auto w = first_wall_fraction(*world.grid, p.pos, end)) {
            best = *w;
            hit_wall = true;
        }
        for (const auto& actor : world.actors) {
            if (!actor.alive || actor.id == p.owner) continue;
            if (auto t = circle_entry(p.pos, p.velocity, actor.pos, c.actor_radius); t && *t < best) {
                best = *t;
                hit_wall = false;
                direct = actor.id;
            }
        }
        for (const auto& barrel : world.barrels) {
            if (barrel.destroyed) continue;
            if (auto t = circle_entry(p.pos, p.velocity, barrel.pos, c.barrel_radius); t && *t < best) {
                best = *t;
                hit_wall = false;
                direct.reset();
            }
        }
        if (best > kFullFraction) {
            world.projectiles[i].pos = end;
            ++i;
            continue;
        }
        const std::uint32_t at = hit_wall ? (best > wall_backoff ? best - wall_backoff : 0) : best;
        const Vec2 center = lerp(p.pos, p.velocity, at);
        world.projectiles.erase(world.projectiles.begin() + static_cast<std::ptrdiff_t>(i));
        std::deque<Explosion> queue{Explosion{center, p.owner, p.attack_id, direct}};
        run_explosions(world, std::move(queue), events);
    }
}

bool try_pickup(WorldState& world, Actor& actor, const Item& item) {
    const auto& c = world.constants;
    auto& counters = world.counters[static_cast<std::size_t>(actor.id)];
    switch (item.kind) {
        case ItemKind::medikit:
            if (actor.health >= c.max_health) return false;
            actor.health = std::min(c.max_health, actor.health + c.medikit_health);
            ++counters.picked_medikits;
            return true;
        case ItemKind::armor:
            if (actor.armor >= c.max_armor) return false;
            actor.armor = std::min(c.max_armor, actor.armor + c.armor_points);
            ++counters.picked_armors;
            return true;
        case ItemKind::ammo_bullets:
            if (actor.bullets >= c.max_bullets) return false;
            actor.bullets = std::min(c.max_bullets, actor.bullets + c.bullets_pickup);
            ++counters.picked_ammo;
            return true;
        case ItemKind::ammo_rockets:
            if (actor.rockets >= c.max_rockets) return false;
            actor.rockets = std::min(c.max_rockets, actor.rockets + c.rockets_pickup);
            ++counters.picked_ammo;
            return true;
        case ItemKind::weapon_rocket_launcher:
            if (actor.has_rocket_launcher && actor.rockets >= c.max_rockets) return false;
            actor.has_rocket_launcher = true;
            actor.rockets = std::min(c.max_rockets, actor.rockets + c.launcher_rockets);
            ++counters.picked_ammo;
            return true;
    }
    return false;
}

void process_items(WorldState& world, std::vector<Event>& events) {
    for (auto& item : world.items)
        if (!item.present() && world.tic >= item.respawn_at_tic) item.respawn_at_tic = 0;

    const std::int64_t reach = world.constants.actor_radius.raw + world.constants.item_radius.raw;
    const std::uint64_t reach_sq = static_cast<std::uint64_t>(reach * reach);
    for (auto& actor : world.actors) {
        if (!actor.alive) continue;
        for (auto& item : world.items) {
            if (!item.present() || dist_sq_raw(actor.pos, item.pos) >= reach_sq) continue;
            if (!try_pickup(world, actor, item)) continue;
            item.respawn_at_tic = world.tic + static_cast<std::uint32_t>(world.constants.item_respawn_tics);
            events.push_back(PickupEvent{actor.id, item.kind});
        }
    }
}

}  // namespace

std::vector<Event> resolve_damage(WorldState& world, const DamageEvent& damage) {
    auto& victim = world.actors.at(static_cast<std::size_t>(damage.victim));
    if (!victim.alive || damage.amount <= 0 || world.tic < victim.protection_until_tic) return {};

    std::vector<Event> events;
    const std::int32_t absorbed = std::min(damage.amount / 3, victim.armor);
    victim.armor -= absorbed;
    victim.health -= damage.amount - absorbed;
    auto& vc = world.counters[static_cast<std::size_t>(damage.victim)];
    ++vc.hits_taken;
    vc.damage_taken_hp += static_cast<std::uint32_t>(damage.amount);
    events.push_back(damage);

    const bool by_enemy = damage.attacker && *damage.attacker != damage.victim;
    if (by_enemy && damage.attack_id) {
        auto& marked = world.damaging_attacks;
        if (std::find(marked.begin(), marked.end(), *damage.attack_id) == marked.end()) {
            marked.push_back(*damage.attack_id);
            ++world.counters.at(static_cast<std::size_t>(*damage.attacker)).attacks_damaging;
        }
    }

    if (victim.health <= 0) {
        victim.health = 0;
        victim.alive = false;
        victim.cooldown_tics = 0;
        victim.death_tic = world.tic;
        victim.respawn_allowed_at_tic = world.tic + std::max<std::uint32_t>(1, world.rules.respawn_delay);
        ++vc.deaths;
        if (by_enemy) ++world.counters.at(static_cast<std::size_t>(*damage.attacker)).kills;
        else ++vc.suicides;
        events.push_back(DeathEvent{damage.victim, damage.attacker});
    }
    return events;
}

std::vector<Event> fire_weapon(WorldState& world, int actor_id) {
    std::vector<Event> events;
    const bool visible = any_enemy_visible(world, actor_id);
    fire(world, actor_id, visible, events);
    return events;
}

std::vector<Event> step(WorldState& world, std::span<const Action> actions) {
    if (actions.size() != world.actors.size())
        throw ContractViolation("step: expected " + std::to_string(world.actors.size()) + " actions, got " +
                                std::to_string(actions.size()));
    std::vector<Event> events;
    world.damaging_attacks.clear();

    // Attack visibility is judged on the state the controllers observed.
    std::vector<std::uint8_t> visible_at_start(world.actors.size(), 0);
    for (const auto& actor : world.actors)
        if (actor.alive && actions[static_cast<std::size_t>(actor.id)].pressed(ButtonBit::attack))
            visible_at_start[static_cast<std::size_t>(actor.id)] = any_enemy_visible(world, actor.id);

    for (auto& actor : world.actors)
        if (!actor.alive && (actions[static_cast<std::size_t>(actor.id)].buttons & kRespawnRequestBit))
            respawn(world, actor.id, events);

    // (1) inputs
    for (auto& actor : world.actors)
        if (actor.alive)
            apply_input(world, actor, actions[static_cast<std::size_t>(actor.id)], visible_at_start[static_cast<std::size_t>(actor.id)] != 0,
                        events);
    // (2) projectiles
    advance_projectiles(world, events);
    // (3) pickups
    process_items(world, events);
    // (4) respawn eligibility, timers
    if (world.rules.auto_respawn)
        for (auto& actor : world.actors)
            if (!actor.alive) respawn(world, actor.id, events);
    for (const auto& actor : world.actors)
        if (actor.alive) ++world.counters[static_cast<std::size_t>(actor.id)].alive_tics;
    if (world.track_discovery)
        for (const auto& actor : world.actors) update_discovery(world, actor.id);

    ++world.tic;
    return events;
}

}  // namespace pixelarena
