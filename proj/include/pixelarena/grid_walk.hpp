#pragma once

// Exact cell traversal of a segment in fixed point (Amanatides-Woo with
// integer cross-multiplication instead of floating tMax values).

#include <cstdint>
#include <cstdlib>
#include <optional>

#include "pixelarena/constants.hpp"
#include "pixelarena/fixed.hpp"
#include "pixelarena/map_grid.hpp"

namespace pixelarena {

// Calls visit(cell_x, cell_y, entry_fraction) for every cell the segment a->b
// passes through, starting with the cell containing a (fraction 0). The entry
// fraction is 16.16 along the segment. Corner crossings visit the x neighbour
// first. Stops early when visit returns false.
template <class Visit>
void walk_segment(Vec2 a, Vec2 b, Visit&& visit) {
    constexpr std::int64_t cell = std::int64_t{1} << kCellShift;
    const std::int64_t ax = a.x.raw, ay = a.y.raw;
    const std::int64_t dx = static_cast<std::int64_t>(b.x.raw) - ax;
    const std::int64_t dy = static_cast<std::int64_t>(b.y.raw) - ay;
    int cx = static_cast<int>(ax >> kCellShift);
    int cy = static_cast<int>(ay >> kCellShift);
    const int ex = static_cast<int>(static_cast<std::int64_t>(b.x.raw) >> kCellShift);
    const int ey = static_cast<int>(static_cast<std::int64_t>(b.y.raw) >> kCellShift);
    const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    int remaining_x = std::abs(ex - cx);
    int remaining_y = std::abs(ey - cy);
    const std::int64_t adx = dx < 0 ? -dx : dx;
    const std::int64_t ady = dy < 0 ? -dy : dy;
    std::int64_t boundary_x = sx > 0 ? (static_cast<std::int64_t>(cx) + 1) * cell : static_cast<std::int64_t>(cx) * cell;
    std::int64_t boundary_y = sy > 0 ? (static_cast<std::int64_t>(cy) + 1) * cell : static_cast<std::int64_t>(cy) * cell;

    if (!visit(cx, cy, std::uint32_t{0})) return;
    while (remaining_x > 0 || remaining_y > 0) {
        const std::int64_t lx = boundary_x > ax ? boundary_x - ax : ax - boundary_x;
        const std::int64_t ly = boundary_y > ay ? boundary_y - ay : ay - boundary_y;
        bool step_x;
        if (remaining_x == 0) step_x = false;
        else if (remaining_y == 0) step_x = true;
        else step_x = lx * ady <= ly * adx;

        std::uint32_t fraction;
        if (step_x) {
            fraction = static_cast<std::uint32_t>((lx << 16) / adx);
            cx += sx;
            --remaining_x;
            boundary_x += sx * cell;
        } else {
            fraction = static_cast<std::uint32_t>((ly << 16) / ady);
            cy += sy;
            --remaining_y;
            boundary_y += sy * cell;
        }
        if (!visit(cx, cy, fraction)) return;
    }
}

// 16.16 fraction along a->b where the first wall cell is entered.
inline std::optional<std::uint32_t> first_wall_fraction(const MapGrid& grid, Vec2 a, Vec2 b) {
    std::optional<std::uint32_t> hit;
    walk_segment(a, b, [&](int x, int y, std::uint32_t f) {
        if (grid.is_wall(x, y)) {
            hit = f;
            return false;
        }
        return true;
    });
    return hit;
}

inline bool segment_clear(const MapGrid& grid, Vec2 a, Vec2 b) { return !first_wall_fraction(grid, a, b).has_value(); }

}  // namespace pixelarena
