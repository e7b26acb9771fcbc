#include "pixelarena/bots.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>

namespace pixelarena {

namespace {

constexpr std::int32_t kAimToleranceCentideg = 200;
constexpr int kStuckLimit = 20;

// Shortest 4-connected path over floor cells; empty when unreachable.
// Returned with the goal first so the next waypoint sits at the back.
std::vector<CellPos> bfs_path(const MapGrid& grid, CellPos from, CellPos to) {
    const auto idx = [&](CellPos c) { return static_cast<std::size_t>(c.y) * grid.width + c.x; };
    std::vector<int> parent(static_cast<std::size_t>(grid.width) * grid.height, -1);
    std::deque<CellPos> queue{from};
    parent[idx(from)] = static_cast<int>(idx(from));
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const CellPos c = queue.front();
        queue.pop_front();
        if (c == to) break;
        for (int k = 0; k < 4; ++k) {
            const CellPos n{c.x + dx[k], c.y + dy[k]};
            if (grid.is_wall(n.x, n.y) || parent[idx(n)] >= 0) continue;
            parent[idx(n)] = static_cast<int>(idx(c));
            queue.push_back(n);
        }
    }
    std::vector<CellPos> path;
    if (parent[idx(to)] < 0) return path;
    for (CellPos c = to; !(c == from);) {
        path.push_back(c);
        const int p = parent[idx(c)];
        c = CellPos{p % grid.width, p / grid.width};
    }
    return path;
}

std::vector<CellPos> reachable_cells(const MapGrid& grid, CellPos from) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(grid.width) * grid.height, 0);
    std::vector<CellPos> out{from};
    seen[static_cast<std::size_t>(from.y) * grid.width + from.x] = 1;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int k = 0; k < 4; ++k) {
            const CellPos n{out[i].x + dx[k], out[i].y + dy[k]};
            auto& s = seen[static_cast<std::size_t>(n.y) * grid.width + n.x];
            if (grid.is_wall(n.x, n.y) || s) continue;
            s = 1;
            out.push_back(n);
        }
    return out;
}

double bearing(Vec2 from, Vec2 to) {
    return std::atan2((to.y - from.y).to_double(), (to.x - from.x).to_double());
}

}  // namespace

std::int32_t angle_error_centideg(Angle current, double target_rad) {
    double diff = target_rad * 18000.0 / 3.14159265358979323846 - current.to_degrees() * 100.0;
    diff = std::fmod(diff, 36000.0);
    if (diff <= -18000.0) diff += 36000.0;
    if (diff > 18000.0) diff -= 36000.0;
    return static_cast<std::int32_t>(std::lround(diff));
}

BotSpec parse_bot_spec(std::string_view text) {
    BotSpec spec;
    std::string_view name = text;
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        name = text.substr(0, colon);
        const std::string_view s = text.substr(colon + 1);
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw ConfigError("bad bot seed in '" + std::string(text) + "'");
        spec.seed = seed;
    }
    std::string lower(name);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "idle") spec.kind = BotKind::idle;
    else if (lower == "wanderer") spec.kind = BotKind::wanderer;
    else if (lower == "fighter") spec.kind = BotKind::fighter;
    else throw ConfigError("unknown bot kind '" + std::string(name) + "' (expected idle, wanderer or fighter)");
    return spec;
}

std::string to_string(BotKind kind) {
    switch (kind) {
        case BotKind::idle: return "idle";
        case BotKind::wanderer: return "wanderer";
        case BotKind::fighter: return "fighter";
    }
    return "?";
}

Bot::Bot(BotKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

Bot::Bot(const BotSpec& spec, std::uint64_t match_seed, int player_id)
    : Bot(spec.kind, spec.seed.value_or(match_seed + static_cast<std::uint64_t>(player_id))) {}

void Bot::plan_path(const WorldState& world, const Actor& me, bool to_medikit) {
    const MapGrid& grid = *world.grid;
    const CellPos here = cell_of(me.pos);
    path_.clear();
    if (to_medikit) {
        std::vector<CellPos> best;
        for (const auto& item : world.items) {
            if (item.kind != ItemKind::medikit || !item.present()) continue;
            auto p = bfs_path(grid, here, item.cell);
            if (!p.empty() && (best.empty() || p.size() < best.size())) best = std::move(p);
        }
        if (!best.empty()) {
            path_ = std::move(best);
            return;
        }
    }
    const auto cells = reachable_cells(grid, here);
    if (cells.size() <= 1) return;
    const CellPos goal = cells[1 + rng_.below(static_cast<std::uint32_t>(cells.size() - 1))];
    path_ = bfs_path(grid, here, goal);
}

Action Bot::follow_path(const WorldState& world, const Actor& me) {
    Action a;
    if (path_.empty()) return a;
    const Vec2 target = cell_center(path_.back());
    if (distance_raw(me.pos, target) < std::int64_t{24} * Fixed::kOne) {
        path_.pop_back();
        if (path_.empty()) return a;
    }
    const std::int32_t err = angle_error_centideg(me.angle, bearing(me.pos, cell_center(path_.back())));
    a.turn_delta = static_cast<std::int16_t>(std::clamp(err, -world.constants.max_turn_centideg, world.constants.max_turn_centideg));
    if (std::abs(err) < 4500) a.press(ButtonBit::move_forward);
    return a;
}

Action Bot::act(const WorldState& world, int self) {
    const Actor& me = world.actors.at(static_cast<std::size_t>(self));
    if (kind_ == BotKind::idle) return {};
    if (!me.alive) {
        path_.clear();
        Action a;
        a.buttons = kRespawnRequestBit;
        return a;
    }

    if (me.pos == last_pos_) ++stuck_tics_;
    else stuck_tics_ = 0;
    last_pos_ = me.pos;

    const bool low = kind_ == BotKind::fighter && me.health < kLowHealth;
    if (low != fleeing_) {
        fleeing_ = low;
        path_.clear();
    }
    if (path_.empty() || stuck_tics_ > kStuckLimit) {
        stuck_tics_ = 0;
        plan_path(world, me, fleeing_);
    }
    Action a = follow_path(world, me);
    if (kind_ != BotKind::fighter) return a;

    // Nearest visible enemy.
    const Actor* target = nullptr;
    std::int64_t best = 0;
    for (const auto& other : world.actors) {
        if (other.id == self || !other.alive || !visibility_test(world, self, other.id)) continue;
        const std::int64_t d = distance_raw(me.pos, other.pos);
        if (!target || d < best) {
            target = &other;
            best = d;
        }
    }
    if (!target) return a;

    const std::int32_t limit = world.constants.max_turn_centideg;
    const std::int32_t err = angle_error_centideg(me.angle, bearing(me.pos, target->pos));
    const std::int32_t turn = std::clamp(err, -limit, limit);
    a.turn_delta = static_cast<std::int16_t>(turn);
    a.buttons &= ~(1u << static_cast<int>(ButtonBit::move_forward));
    if (!fleeing_ && best > std::int64_t{256} * Fixed::kOne) a.press(ButtonBit::move_forward);
    const bool rockets_ok = me.has_rocket_launcher && me.rockets > 0 && best > 2 * world.constants.blast_radius.raw;
    if (rockets_ok && me.selected != Weapon::rocket_launcher) a.press(ButtonBit::select_weapon_2);
    if (!rockets_ok && me.selected != Weapon::pistol) a.press(ButtonBit::select_weapon_1);
    if (std::abs(err - turn) <= kAimToleranceCentideg) a.press(ButtonBit::attack);
    return a;
}

}  // namespace pixelarena
