#pragma once

// Per-frame setup shared by the serial and OpenMP renderers. Each column is
// rendered independently by render_column, so both entry points produce the
// same bytes.

#include <array>
#include <cstdint>
#include <vector>

#include "pixelarena/render.hpp"

namespace pixelarena::detail {

using Rgb = std::array<std::uint8_t, 3>;

struct SpriteSpan {
    double depth = 0;  // perpendicular, world units
    std::uint8_t depth_byte = 0;
    double left = 0, right = 0;  // screen x, half-open
    double top = 0, bottom = 0;  // screen y, half-open
    std::uint8_t label = 0;      // 0 when it ran out of label values
    Rgb color{};
    // Metadata for label entries.
    std::uint32_t object_id = 0;
    const char* name = "";
    double pos_x = 0, pos_y = 0, angle_deg = 0, vel_x = 0, vel_y = 0;
};

struct FramePlan {
    const MapGrid* grid = nullptr;
    RenderOptions opts;
    double px = 0, py = 0;  // viewer, world units
    double angle = 0;
    double focal = 0;
    double horizon = 0;
    std::vector<SpriteSpan> sprites;  // far to near
    FrameBundle* out = nullptr;
};

FramePlan make_plan(const WorldState& world, int viewer_id, const RenderOptions& opts, FrameBundle& out);
void render_column(const FramePlan& plan, int x);
// HUD, crosshair and label entries; runs after all columns.
void finish_frame(const WorldState& world, int viewer_id, const FramePlan& plan);

}  // namespace pixelarena::detail
