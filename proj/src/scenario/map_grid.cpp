#include "pixelarena/map_grid.hpp"

#include <string>

namespace pixelarena {

const char* item_kind_name(ItemKind kind) {
    switch (kind) {
        case ItemKind::medikit: return "Medikit";
        case ItemKind::armor: return "Armor";
        case ItemKind::ammo_bullets: return "Bullets";
        case ItemKind::ammo_rockets: return "Rockets";
        case ItemKind::weapon_rocket_launcher: return "RocketLauncher";
    }
    return "Unknown";
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace

MapGrid parse_map(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty map");

    MapGrid grid;
    grid.width = static_cast<int>(lines.front().size());
    grid.height = static_cast<int>(lines.size());
    if (grid.width < 3 || grid.height < 3) throw ParseError("map must be at least 3x3 cells");
    if (grid.width > MapGrid::kMaxSide || grid.height > MapGrid::kMaxSide)
        throw ParseError("map exceeds " + std::to_string(MapGrid::kMaxSide) + " cells per side");

    grid.walls.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
    for (int y = 0; y < grid.height; ++y) {
        const auto line = lines[y];
        if (static_cast<int>(line.size()) != grid.width)
            throw ParseError("non-rectangular map (line " + std::to_string(y + 1) + " has " +
                             std::to_string(line.size()) + " columns, expected " + std::to_string(grid.width) + ")");
        for (int x = 0; x < grid.width; ++x) {
            const char c = line[x];
            const CellPos cell{x, y};
            switch (c) {
                case '#': grid.walls[static_cast<std::size_t>(y) * grid.width + x] = 1; break;
                case '.': break;
                case 'S': grid.spawns.push_back(cell); break;
                case 'M': grid.items.push_back({ItemKind::medikit, cell}); break;
                case 'A': grid.items.push_back({ItemKind::armor, cell}); break;
                case 'a': grid.items.push_back({ItemKind::ammo_bullets, cell}); break;
                case 'r': grid.items.push_back({ItemKind::ammo_rockets, cell}); break;
                case 'R': grid.items.push_back({ItemKind::weapon_rocket_launcher, cell}); break;
                case 'B': grid.barrels.push_back(cell); break;
                default:
                    throw ParseError(std::string("unknown tile '") + c + "' at " + std::to_string(y + 1) + ":" +
                                     std::to_string(x + 1));
            }
            const bool border = x == 0 || y == 0 || x == grid.width - 1 || y == grid.height - 1;
            if (border && c != '#')
                throw ParseError("map border must be wall at " + std::to_string(y + 1) + ":" + std::to_string(x + 1));
        }
    }
    if (grid.spawns.empty()) throw ParseError("map has no spawn point");
    return grid;
}

std::string serialize_map(const MapGrid& grid) {
    std::string out;
    out.reserve(static_cast<std::size_t>(grid.width + 1) * grid.height);
    std::vector<char> tiles(static_cast<std::size_t>(grid.width) * grid.height, '.');
    for (std::size_t i = 0; i < grid.walls.size(); ++i)
        if (grid.walls[i]) tiles[i] = '#';
    auto at = [&](CellPos c) -> char& { return tiles[static_cast<std::size_t>(c.y) * grid.width + c.x]; };
    for (const auto& s : grid.spawns) at(s) = 'S';
    for (const auto& b : grid.barrels) at(b) = 'B';
    for (const auto& item : grid.items) {
        static constexpr char kChars[] = {'M', 'A', 'a', 'r', 'R'};
        at(item.cell) = kChars[static_cast<int>(item.kind)];
    }
    for (int y = 0; y < grid.height; ++y) {
        out.append(tiles.begin() + static_cast<std::ptrdiff_t>(y) * grid.width,
                   tiles.begin() + static_cast<std::ptrdiff_t>(y + 1) * grid.width);
        out.push_back('\n');
    }
    return out;
}

}  // namespace pixelarena
