#pragma once

// Software column raycaster. Floating point is fine here: nothing rendered
// feeds back into the simulation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pixelarena/render_options.hpp"
#include "pixelarena/world.hpp"

namespace pixelarena {

inline constexpr double kEyeHeight = 41.0;
inline constexpr double kWallHeight = 128.0;
inline constexpr double kSpriteRadius = 20.0;
inline constexpr double kSpriteHeight = 56.0;
inline constexpr double kDepthUnitsPerStep = 8.0;

struct LabelEntry {
    std::uint8_t value = 0;  // pixel value in the label buffer
    std::uint32_t object_id = 0;
    std::string name;
    int x = 0, y = 0, w = 0, h = 0;
    double pos_x = 0, pos_y = 0;  // world units
    double angle_deg = 0;
    double vel_x = 0, vel_y = 0;  // units per tic
};

struct FrameBundle {
    int width = 0;
    int height = 0;
    ScreenFormat format = ScreenFormat::rgb24;
    std::vector<std::uint8_t> screen;
    std::optional<std::vector<std::uint8_t>> depth;
    std::optional<std::vector<std::uint8_t>> labels;
    std::optional<std::vector<std::uint8_t>> automap;
    std::vector<LabelEntry> label_entries;
    std::vector<double> column_distance;  // perpendicular wall distance per column, world units
};

struct ColumnHit {
    double distance = 0;  // perpendicular, world units
    int cell_x = 0;
    int cell_y = 0;
    bool y_side = false;  // hit a horizontal cell face
};

// One DDA ray for screen column `column` of `width`, from a viewer at
// (x, y) world units looking along angle_rad.
ColumnHit cast_column(const MapGrid& grid, double x, double y, double angle_rad, int column, int width);

inline std::uint8_t quantize_depth(double units) {
    const double q = units / kDepthUnitsPerStep + 0.5;
    if (q <= 0) return 0;
    if (q >= 255) return 255;
    return static_cast<std::uint8_t>(q);
}

// Serial reference implementation.
FrameBundle render_frame(const WorldState& world, int viewer_id, const RenderOptions& opts);
// OpenMP over columns; byte-identical to render_frame.
FrameBundle render_frame_parallel(const WorldState& world, int viewer_id, const RenderOptions& opts);

// Maps world units onto automap pixels: px = off_x + units / kCellUnits * scale.
struct AutomapTransform {
    double scale = 1;  // pixels per cell
    double off_x = 0;
    double off_y = 0;
};
AutomapTransform automap_transform(const MapGrid& grid, const RenderOptions& opts);
inline constexpr std::uint8_t kAutomapViewer[3] = {0, 255, 0};
inline constexpr std::uint8_t kAutomapWall[3] = {208, 208, 208};

// Top-down map in the screen format. Uses world.discovered unless automap_full.
std::vector<std::uint8_t> render_automap(const WorldState& world, int viewer_id, const RenderOptions& opts);

// Single-channel luminance of an RGB triple.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((77 * r + 150 * g + 29 * b) >> 8);
}

void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb);
void write_pgm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& gray);
// Writes the screen as P6 or P5 depending on the format.
void write_image(const std::filesystem::path& path, int width, int height, ScreenFormat format,
                 const std::vector<std::uint8_t>& pixels);

struct BenchReport {
    int width = 0;
    int height = 0;
    int frames = 0;
    double fps = 0;  // screen only
    double fps_all_buffers = 0;
    double ms_screen = 0;  // mean per frame
    double ms_depth = 0;   // extra cost of each buffer
    double ms_labels = 0;
    double ms_automap = 0;
};

// Renders a fixed benchmark world `frames` times on the calling thread.
BenchReport bench(const RenderOptions& opts, int frames);
WorldState bench_world();

namespace detail {
void draw_hud(const WorldState& world, int viewer_id, const RenderOptions& opts, std::vector<std::uint8_t>& screen);
void draw_crosshair(const RenderOptions& opts, std::vector<std::uint8_t>& screen);
}  // namespace detail

}  // namespace pixelarena
