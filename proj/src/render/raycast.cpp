#include <algorithm>
#include <cmath>
#include <limits>

#include "frame_plan.hpp"

namespace pixelarena {

namespace {

using detail::Rgb;

constexpr Rgb kCeiling{56, 56, 64};
constexpr Rgb kFloor{96, 88, 80};
constexpr std::array<Rgb, 6> kWallPalette{{
    {168, 64, 56}, {72, 120, 168}, {152, 144, 88}, {96, 152, 96}, {136, 104, 160}, {168, 120, 72},
}};
constexpr std::array<Rgb, 8> kActorPalette{{
    {220, 40, 40}, {40, 200, 60}, {60, 90, 230}, {230, 200, 40}, {200, 60, 200}, {40, 200, 200}, {240, 140, 40},
    {180, 180, 180},
}};

Rgb item_color(ItemKind kind) {
    switch (kind) {
        case ItemKind::medikit: return {240, 240, 240};
        case ItemKind::armor: return {60, 220, 120};
        case ItemKind::ammo_bullets: return {250, 220, 90};
        case ItemKind::ammo_rockets: return {150, 100, 60};
        case ItemKind::weapon_rocket_launcher: return {120, 80, 200};
    }
    return {255, 255, 255};
}

Rgb wall_color(int cx, int cy, bool y_side) {
    Rgb c = kWallPalette[static_cast<std::size_t>((cx * 7 + cy * 13) % 6)];
    if (y_side)
        for (auto& v : c) v = static_cast<std::uint8_t>(v * 7 / 10);
    return c;
}

}  // namespace

ColumnHit cast_column(const MapGrid& grid, double x, double y, double angle_rad, int column, int width) {
    // Plane length 1 corresponds to the 90 degree field of view.
    const double dir_x = std::cos(angle_rad), dir_y = std::sin(angle_rad);
    const double cam = static_cast<double>(2 * column + 1 - width) / width;
    const double rx = dir_x - dir_y * cam;
    const double ry = dir_y + dir_x * cam;

    const double pos_x = x / kCellUnits, pos_y = y / kCellUnits;
    int map_x = static_cast<int>(std::floor(pos_x));
    int map_y = static_cast<int>(std::floor(pos_y));
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double delta_x = rx == 0 ? inf : std::abs(1.0 / rx);
    const double delta_y = ry == 0 ? inf : std::abs(1.0 / ry);
    int step_x, step_y;
    double side_x, side_y;
    if (rx < 0) {
        step_x = -1;
        side_x = (pos_x - map_x) * delta_x;
    } else {
        step_x = 1;
        side_x = (map_x + 1.0 - pos_x) * delta_x;
    }
    if (ry < 0) {
        step_y = -1;
        side_y = (pos_y - map_y) * delta_y;
    } else {
        step_y = 1;
        side_y = (map_y + 1.0 - pos_y) * delta_y;
    }
    bool y_side = false;
    // The border is solid, and out-of-range cells read as wall.
    for (;;) {
        if (side_x < side_y) {
            side_x += delta_x;
            map_x += step_x;
            y_side = false;
        } else {
            side_y += delta_y;
            map_y += step_y;
            y_side = true;
        }
        if (grid.is_wall(map_x, map_y)) break;
    }
    const double perp = y_side ? side_y - delta_y : side_x - delta_x;
    return ColumnHit{perp * kCellUnits, map_x, map_y, y_side};
}

namespace detail {

FramePlan make_plan(const WorldState& world, int viewer_id, const RenderOptions& opts, FrameBundle& out) {
    if (viewer_id < 0 || viewer_id >= world.player_count()) throw ContractViolation("render: unknown viewer");
    if (!opts.valid()) throw ContractViolation("render: invalid options");
    const auto pixels = static_cast<std::size_t>(opts.width) * opts.height;
    out.width = opts.width;
    out.height = opts.height;
    out.format = opts.format;
    out.screen.assign(pixels * opts.channels(), 0);
    out.depth.reset();
    out.labels.reset();
    out.automap.reset();
    out.label_entries.clear();
    if (opts.depth_enabled) out.depth.emplace(pixels, 0);
    if (opts.labels_enabled) out.labels.emplace(pixels, 0);
    out.column_distance.assign(static_cast<std::size_t>(opts.width), 0.0);

    FramePlan plan;
    plan.grid = world.grid.get();
    plan.opts = opts;
    plan.out = &out;
    const Actor& viewer = world.actors[static_cast<std::size_t>(viewer_id)];
    plan.px = viewer.pos.x.to_double();
    plan.py = viewer.pos.y.to_double();
    plan.angle = viewer.angle.to_radians();
    // Unit camera plane: 90 degree field of view.
    plan.focal = opts.width / 2.0;
    plan.horizon = opts.height / 2.0;

    const double dir_x = std::cos(plan.angle), dir_y = std::sin(plan.angle);
    auto add = [&](double wx, double wy, Rgb color, std::uint32_t id, const char* name, double angle_deg, double vx,
                   double vy) {
        const double rx = wx - plan.px, ry = wy - plan.py;
        const double depth = rx * dir_x + ry * dir_y;
        if (depth < 1.0) return;
        const double across = -rx * dir_y + ry * dir_x;
        const double sx = opts.width / 2.0 * (1.0 + across / depth);
        const double half_w = kSpriteRadius * plan.focal / depth;
        SpriteSpan s;
        s.depth = depth;
        s.depth_byte = quantize_depth(depth);
        s.left = sx - half_w;
        s.right = sx + half_w;
        s.top = plan.horizon - (kSpriteHeight - kEyeHeight) * plan.focal / depth;
        s.bottom = plan.horizon + kEyeHeight * plan.focal / depth;
        if (s.right <= 0 || s.left >= opts.width) return;
        s.color = color;
        s.object_id = id;
        s.name = name;
        s.pos_x = wx;
        s.pos_y = wy;
        s.angle_deg = angle_deg;
        s.vel_x = vx;
        s.vel_y = vy;
        plan.sprites.push_back(s);
    };
    for (const auto& a : world.actors) {
        if (a.id == viewer_id || !a.alive) continue;
        add(a.pos.x.to_double(), a.pos.y.to_double(), kActorPalette[static_cast<std::size_t>(a.id) % kActorPalette.size()],
            static_cast<std::uint32_t>(a.id), "Actor", a.angle.to_degrees(), 0, 0);
    }
    for (const auto& item : world.items) {
        if (!item.present()) continue;
        add(item.pos.x.to_double(), item.pos.y.to_double(), item_color(item.kind), item.id, item_kind_name(item.kind), 0, 0,
            0);
    }
    for (const auto& b : world.barrels) {
        if (b.destroyed) continue;
        add(b.pos.x.to_double(), b.pos.y.to_double(), Rgb{40, 110, 50}, b.id, "Barrel", 0, 0, 0);
    }
    for (const auto& p : world.projectiles) {
        const double vx = p.velocity.x.to_double(), vy = p.velocity.y.to_double();
        add(p.pos.x.to_double(), p.pos.y.to_double(), Rgb{255, 150, 30}, p.id, "Rocket",
            std::atan2(vy, vx) * 180.0 / 3.14159265358979323846, vx, vy);
    }

    // Label values go to the nearest objects first; drawing runs far to near.
    std::sort(plan.sprites.begin(), plan.sprites.end(), [](const SpriteSpan& a, const SpriteSpan& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.object_id < b.object_id;
    });
    for (std::size_t i = 0; i < plan.sprites.size(); ++i) plan.sprites[i].label = i < 255 ? static_cast<std::uint8_t>(i + 1) : 0;
    std::reverse(plan.sprites.begin(), plan.sprites.end());
    return plan;
}

void render_column(const FramePlan& plan, int x) {
    const RenderOptions& o = plan.opts;
    FrameBundle& out = *plan.out;
    const ColumnHit hit = cast_column(*plan.grid, plan.px, plan.py, plan.angle, x, o.width);
    const double distance = hit.distance;
    out.column_distance[static_cast<std::size_t>(x)] = distance;
    const double d = std::max(distance, 1e-6);
    const double wall_top = plan.horizon - (kWallHeight - kEyeHeight) * plan.focal / d;
    const double wall_bottom = plan.horizon + kEyeHeight * plan.focal / d;
    const std::uint8_t wall_byte = quantize_depth(distance);
    const Rgb wall = wall_color(hit.cell_x, hit.cell_y, hit.y_side);

    const int channels = o.channels();
    const std::size_t stride = static_cast<std::size_t>(o.width);
    std::uint8_t* screen = out.screen.data();
    std::uint8_t* depth = out.depth ? out.depth->data() : nullptr;
    std::uint8_t* labels = out.labels ? out.labels->data() : nullptr;

    auto put = [&](int y, const Rgb& c) {
        const std::size_t i = static_cast<std::size_t>(y) * stride + x;
        if (channels == 3) {
            std::uint8_t* p = screen + i * 3;
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        } else {
            screen[i] = luminance(c[0], c[1], c[2]);
        }
    };

    for (int y = 0; y < o.height; ++y) {
        const double cy = y + 0.5;
        if (cy >= wall_top && cy < wall_bottom) {
            put(y, wall);
            if (depth) depth[static_cast<std::size_t>(y) * stride + x] = wall_byte;
        } else if (cy < wall_top) {
            put(y, kCeiling);
            if (depth) {
                const double row = (kWallHeight - kEyeHeight) * plan.focal / (plan.horizon - cy);
                depth[static_cast<std::size_t>(y) * stride + x] = quantize_depth(std::min(row, distance));
            }
        } else {
            put(y, kFloor);
            if (depth) {
                const double row = kEyeHeight * plan.focal / (cy - plan.horizon);
                depth[static_cast<std::size_t>(y) * stride + x] = quantize_depth(std::min(row, distance));
            }
        }
    }

    const double cx = x + 0.5;
    for (const auto& s : plan.sprites) {
        if (cx < s.left || cx >= s.right) continue;
        if (s.depth_byte >= wall_byte) continue;
        const int y0 = std::max(0, static_cast<int>(std::ceil(s.top - 0.5)));
        const int y1 = std::min(o.height, static_cast<int>(std::ceil(s.bottom - 0.5)));
        for (int y = y0; y < y1; ++y) {
            // Darker lower half for a little shape.
            const bool lower = (y + 0.5) > (s.top + s.bottom) / 2;
            Rgb c = s.color;
            if (lower)
                for (auto& v : c) v = static_cast<std::uint8_t>(v * 3 / 4);
            put(y, c);
            const std::size_t i = static_cast<std::size_t>(y) * stride + x;
            if (depth) depth[i] = s.depth_byte;
            if (labels) labels[i] = s.label;
        }
    }
}

void finish_frame(const WorldState& world, int viewer_id, const FramePlan& plan) {
    FrameBundle& out = *plan.out;
    const RenderOptions& o = plan.opts;
    if (out.labels) {
        struct Box {
            int x0 = std::numeric_limits<int>::max(), y0 = std::numeric_limits<int>::max(), x1 = -1, y1 = -1;
        };
        std::array<Box, 256> boxes{};
        const auto& lab = *out.labels;
        for (int y = 0; y < o.height; ++y) {
            const std::uint8_t* row = lab.data() + static_cast<std::size_t>(y) * o.width;
            for (int x = 0; x < o.width; ++x) {
                const std::uint8_t v = row[x];
                if (!v) continue;
                Box& b = boxes[v];
                b.x0 = std::min(b.x0, x);
                b.x1 = std::max(b.x1, x);
                b.y0 = std::min(b.y0, y);
                b.y1 = std::max(b.y1, y);
            }
        }
        // Nearest first, matching label value order.
        for (auto it = plan.sprites.rbegin(); it != plan.sprites.rend(); ++it) {
            const SpriteSpan& s = *it;
            if (!s.label || boxes[s.label].x1 < 0) continue;
            const Box& b = boxes[s.label];
            LabelEntry e;
            e.value = s.label;
            e.object_id = s.object_id;
            e.name = s.name;
            e.x = b.x0;
            e.y = b.y0;
            e.w = b.x1 - b.x0 + 1;
            e.h = b.y1 - b.y0 + 1;
            e.pos_x = s.pos_x;
            e.pos_y = s.pos_y;
            e.angle_deg = s.angle_deg;
            e.vel_x = s.vel_x;
            e.vel_y = s.vel_y;
            out.label_entries.push_back(std::move(e));
        }
    }
    if (o.hud) draw_hud(world, viewer_id, o, out.screen);
    if (o.crosshair) draw_crosshair(o, out.screen);
    if (o.automap_enabled) out.automap = render_automap(world, viewer_id, o);
}

}  // namespace detail

FrameBundle render_frame(const WorldState& world, int viewer_id, const RenderOptions& opts) {
    FrameBundle out;
    const detail::FramePlan plan = detail::make_plan(world, viewer_id, opts, out);
    for (int x = 0; x < opts.width; ++x) detail::render_column(plan, x);
    detail::finish_frame(world, viewer_id, plan);
    return out;
}

}  // namespace pixelarena
