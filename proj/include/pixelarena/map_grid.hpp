#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pixelarena {

// Raised for malformed map or config text; the message names the offending spot.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ItemKind : std::uint8_t {
    medikit = 0,
    armor = 1,
    ammo_bullets = 2,
    ammo_rockets = 3,
    weapon_rocket_launcher = 4,
};

const char* item_kind_name(ItemKind kind);

struct CellPos {
    int x = 0;
    int y = 0;
    friend bool operator==(CellPos, CellPos) = default;
};

struct ItemPlacement {
    ItemKind kind;
    CellPos cell;
    friend bool operator==(const ItemPlacement&, const ItemPlacement&) = default;
};

// Rectangular wall/floor grid. Row 0 is the first text line; y grows downward.
struct MapGrid {
    static constexpr int kMaxSide = 120;

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> walls;  // row-major, 1 = wall
    std::vector<CellPos> spawns;
    std::vector<ItemPlacement> items;
    std::vector<CellPos> barrels;

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
    // Out-of-range cells read as wall.
    bool is_wall(int x, int y) const { return !in_bounds(x, y) || walls[static_cast<std::size_t>(y) * width + x] != 0; }

    friend bool operator==(const MapGrid&, const MapGrid&) = default;
};

// '#' wall, '.' floor, 'S' spawn, 'M' medikit, 'A' armor, 'a' bullets,
// 'r' rockets, 'R' rocket launcher, 'B' barrel. LF or CRLF.
MapGrid parse_map(std::string_view text);

std::string serialize_map(const MapGrid& grid);

}  // namespace pixelarena
