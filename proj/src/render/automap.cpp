#include <algorithm>
#include <cmath>

#include "pixelarena/render.hpp"

namespace pixelarena {

namespace {

struct Canvas {
    const RenderOptions& o;
    std::vector<std::uint8_t>& px;

    void set(int x, int y, const std::uint8_t* c) {
        if (x < 0 || y < 0 || x >= o.width || y >= o.height) return;
        const std::size_t i = static_cast<std::size_t>(y) * o.width + x;
        if (o.format == ScreenFormat::rgb24) {
            px[i * 3] = c[0];
            px[i * 3 + 1] = c[1];
            px[i * 3 + 2] = c[2];
        } else {
            px[i] = luminance(c[0], c[1], c[2]);
        }
    }

    void rect(double x0, double y0, double x1, double y1, const std::uint8_t* c) {
        const int ix0 = static_cast<int>(std::floor(x0)), iy0 = static_cast<int>(std::floor(y0));
        const int ix1 = std::max(ix0 + 1, static_cast<int>(std::floor(x1))), iy1 = std::max(iy0 + 1, static_cast<int>(std::floor(y1)));
        for (int y = iy0; y < iy1; ++y)
            for (int x = ix0; x < ix1; ++x) set(x, y, c);
    }

    // Filled triangle pointing along angle; the center pixel is always covered.
    void triangle(double cx, double cy, double angle, double size, const std::uint8_t* c) {
        const double dx = std::cos(angle), dy = std::sin(angle);
        const double ax = cx + dx * size, ay = cy + dy * size;
        const double bx = cx - dx * size * 0.6 - dy * size * 0.6, by = cy - dy * size * 0.6 + dx * size * 0.6;
        const double qx = cx - dx * size * 0.6 + dy * size * 0.6, qy = cy - dy * size * 0.6 - dx * size * 0.6;
        const int x0 = static_cast<int>(std::floor(std::min({ax, bx, qx}))), x1 = static_cast<int>(std::ceil(std::max({ax, bx, qx})));
        const int y0 = static_cast<int>(std::floor(std::min({ay, by, qy}))), y1 = static_cast<int>(std::ceil(std::max({ay, by, qy})));
        auto edge = [](double x0_, double y0_, double x1_, double y1_, double x, double y) {
            return (x1_ - x0_) * (y - y0_) - (y1_ - y0_) * (x - x0_);
        };
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double sx = x + 0.5, sy = y + 0.5;
                const double e0 = edge(ax, ay, bx, by, sx, sy), e1 = edge(bx, by, qx, qy, sx, sy), e2 = edge(qx, qy, ax, ay, sx, sy);
                if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0)) set(x, y, c);
            }
        set(static_cast<int>(std::floor(cx)), static_cast<int>(std::floor(cy)), c);
    }
};

constexpr std::uint8_t kFloorSeen[3] = {48, 48, 48};
constexpr std::uint8_t kEnemy[3] = {230, 50, 50};
constexpr std::uint8_t kItem[3] = {80, 140, 240};
constexpr std::uint8_t kBarrelColor[3] = {60, 150, 60};
constexpr std::uint8_t kRocket[3] = {255, 150, 30};

}  // namespace

AutomapTransform automap_transform(const MapGrid& grid, const RenderOptions& opts) {
    AutomapTransform t;
    t.scale = std::min(static_cast<double>(opts.width) / grid.width, static_cast<double>(opts.height) / grid.height);
    t.off_x = (opts.width - t.scale * grid.width) / 2;
    t.off_y = (opts.height - t.scale * grid.height) / 2;
    return t;
}

std::vector<std::uint8_t> render_automap(const WorldState& world, int viewer_id, const RenderOptions& opts) {
    if (viewer_id < 0 || viewer_id >= world.player_count()) throw ContractViolation("automap: unknown viewer");
    const MapGrid& grid = *world.grid;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(opts.width) * opts.height * opts.channels(), 0);
    Canvas canvas{opts, pixels};
    const AutomapTransform t = automap_transform(grid, opts);
    const std::vector<std::uint8_t>* seen = nullptr;
    if (!opts.automap_full && static_cast<std::size_t>(viewer_id) < world.discovered.size())
        seen = &world.discovered[static_cast<std::size_t>(viewer_id)];
    auto known = [&](int x, int y) {
        if (opts.automap_full) return true;
        if (!seen || seen->empty()) return false;
        return (*seen)[static_cast<std::size_t>(y) * grid.width + x] != 0;
    };
    auto to_px = [&](Vec2 p) {
        return std::pair{t.off_x + p.x.to_double() / kCellUnits * t.scale, t.off_y + p.y.to_double() / kCellUnits * t.scale};
    };

    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            if (!known(x, y)) continue;
            const std::uint8_t* c = grid.is_wall(x, y) ? kAutomapWall : kFloorSeen;
            canvas.rect(t.off_x + x * t.scale, t.off_y + y * t.scale, t.off_x + (x + 1) * t.scale, t.off_y + (y + 1) * t.scale, c);
        }

    const double size = std::max(2.0, t.scale * 0.35);
    for (const auto& item : world.items)
        if (item.present() && known(item.cell.x, item.cell.y)) {
            auto [x, y] = to_px(item.pos);
            canvas.triangle(x, y, -1.5707963267948966, size * 0.7, kItem);
        }
    for (const auto& b : world.barrels)
        if (!b.destroyed && known(b.cell.x, b.cell.y)) {
            auto [x, y] = to_px(b.pos);
            canvas.triangle(x, y, -1.5707963267948966, size * 0.7, kBarrelColor);
        }
    for (const auto& p : world.projectiles) {
        const CellPos c = cell_of(p.pos);
        if (!grid.in_bounds(c.x, c.y) || !known(c.x, c.y)) continue;
        auto [x, y] = to_px(p.pos);
        canvas.triangle(x, y, std::atan2(p.velocity.y.to_double(), p.velocity.x.to_double()), size * 0.5, kRocket);
    }
    for (const auto& a : world.actors) {
        if (a.id == viewer_id || !a.alive) continue;
        // Without the full map only currently visible enemies are shown.
        if (!opts.automap_full && !visibility_test(world, viewer_id, a.id)) continue;
        auto [x, y] = to_px(a.pos);
        canvas.triangle(x, y, a.angle.to_radians(), size, kEnemy);
    }
    const Actor& v = world.actors[static_cast<std::size_t>(viewer_id)];
    auto [vx, vy] = to_px(v.pos);
    canvas.triangle(vx, vy, v.angle.to_radians(), size, kAutomapViewer);
    return pixels;
}

}  // namespace pixelarena
