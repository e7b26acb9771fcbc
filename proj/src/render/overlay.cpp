#include <algorithm>
#include <array>
#include <string>

#include "pixelarena/render.hpp"

namespace pixelarena::detail {

namespace {

// 3x5 glyphs, one row per entry, bit 2 = left column.
struct Glyph {
    char c;
    std::array<std::uint8_t, 5> rows;
};

constexpr std::array<Glyph, 16> kFont{{
    {'0', {7, 5, 5, 5, 7}}, {'1', {2, 6, 2, 2, 7}}, {'2', {7, 1, 7, 4, 7}}, {'3', {7, 1, 7, 1, 7}},
    {'4', {5, 5, 7, 1, 1}}, {'5', {7, 4, 7, 1, 7}}, {'6', {7, 4, 7, 5, 7}}, {'7', {7, 1, 1, 1, 1}},
    {'8', {7, 5, 7, 5, 7}}, {'9', {7, 5, 7, 1, 7}}, {'H', {5, 5, 7, 5, 5}}, {'P', {7, 5, 7, 4, 4}},
    {'A', {2, 5, 7, 5, 5}}, {'R', {6, 5, 6, 5, 5}}, {'M', {5, 7, 7, 5, 5}}, {'-', {0, 0, 7, 0, 0}},
}};

void set_pixel(const RenderOptions& o, std::vector<std::uint8_t>& screen, int x, int y, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
    if (x < 0 || y < 0 || x >= o.width || y >= o.height) return;
    const std::size_t i = static_cast<std::size_t>(y) * o.width + x;
    if (o.format == ScreenFormat::rgb24) {
        screen[i * 3] = r;
        screen[i * 3 + 1] = g;
        screen[i * 3 + 2] = b;
    } else {
        screen[i] = luminance(r, g, b);
    }
}

void draw_text(const RenderOptions& o, std::vector<std::uint8_t>& screen, int x, int y, int scale, const std::string& text) {
    for (char ch : text) {
        const auto it = std::find_if(kFont.begin(), kFont.end(), [&](const Glyph& g) { return g.c == ch; });
        if (it != kFont.end()) {
            for (int row = 0; row < 5; ++row)
                for (int col = 0; col < 3; ++col)
                    if ((it->rows[static_cast<std::size_t>(row)] >> (2 - col)) & 1)
                        for (int sy = 0; sy < scale; ++sy)
                            for (int sx = 0; sx < scale; ++sx)
                                set_pixel(o, screen, x + col * scale + sx, y + row * scale + sy, 240, 200, 60);
        }
        x += 4 * scale;
    }
}

}  // namespace

void draw_hud(const WorldState& world, int viewer_id, const RenderOptions& o, std::vector<std::uint8_t>& screen) {
    const Actor& a = world.actors[static_cast<std::size_t>(viewer_id)];
    const int strip = std::max(7, o.height / 12);
    for (int y = o.height - strip; y < o.height; ++y)
        for (int x = 0; x < o.width; ++x) set_pixel(o, screen, x, y, 32, 32, 32);
    const int scale = std::max(1, (strip - 2) / 5);
    const std::string text = "HP" + std::to_string(a.health) + " AR" + std::to_string(a.armor) + " AM" +
                             std::to_string(a.ammo_for(a.selected));
    draw_text(o, screen, 2, o.height - strip + (strip - 5 * scale) / 2, scale, text);
}

void draw_crosshair(const RenderOptions& o, std::vector<std::uint8_t>& screen) {
    const int cx = o.width / 2, cy = o.height / 2;
    const int arm = std::max(2, o.width / 80);
    for (int d = -arm; d <= arm; ++d) {
        set_pixel(o, screen, cx + d, cy, 0, 255, 0);
        set_pixel(o, screen, cx, cy + d, 0, 255, 0);
    }
}

}  // namespace pixelarena::detail
