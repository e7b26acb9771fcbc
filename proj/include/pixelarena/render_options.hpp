#pragma once

#include <cstdint>

namespace pixelarena {

enum class ScreenFormat : std::uint8_t { rgb24 = 0, gray8 = 1 };

struct RenderOptions {
    int width = 320;
    int height = 240;
    ScreenFormat format = ScreenFormat::rgb24;
    bool crosshair = false;
    bool hud = false;
    bool depth_enabled = false;
    bool labels_enabled = false;
    bool automap_enabled = false;
    bool automap_full = false;

    int channels() const { return format == ScreenFormat::rgb24 ? 3 : 1; }
    bool valid() const { return width >= 1 && height >= 1 && width <= 4096 && height <= 4096; }
    friend bool operator==(const RenderOptions&, const RenderOptions&) = default;
};

}  // namespace pixelarena
