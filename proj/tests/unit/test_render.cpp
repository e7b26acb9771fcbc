#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "pixelarena/render.hpp"
#include "pixelarena/scenario.hpp"

using namespace pixelarena;
using namespace test;

namespace {

// Open arena with pillars and no items, so only actors are sprites.
constexpr std::string_view kPillars =
    "################\n"
    "#S.............#\n"
    "#..##.....#....#\n"
    "#..##..........#\n"
    "#.......#...#..#\n"
    "#..............#\n"
    "#....#.....##..#\n"
    "#..........##.S#\n"
    "################\n";

Vec2 random_floor_point(const MapGrid& g, std::mt19937_64& gen) {
    for (;;) {
        const int x = static_cast<int>(gen() % static_cast<unsigned>(g.width));
        const int y = static_cast<int>(gen() % static_cast<unsigned>(g.height));
        if (g.is_wall(x, y)) continue;
        std::uniform_real_distribution<double> off(-40, 40);
        return at_units(x * 128 + 64 + off(gen), y * 128 + 64 + off(gen));
    }
}

void scatter(WorldState& w, std::mt19937_64& gen) {
    for (auto& a : w.actors) {
        a.pos = random_floor_point(*w.grid, gen);
        a.angle = Angle{static_cast<std::uint32_t>(gen())};
    }
}

// Marches the ray of the given column in 0.01-cell steps; returns the
// perpendicular distance in cells to the first wall cell entered.
double ray_march_cells(const MapGrid& g, double x, double y, double angle, int column, int width) {
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double cam = (2.0 * column + 1 - width) / width;
    double rx = dx - dy * cam, ry = dy + dx * cam;
    const double len = std::hypot(rx, ry);
    rx /= len;
    ry /= len;
    const double px = x / 128, py = y / 128;
    auto cell = [&](double t) {
        return std::pair{static_cast<int>(std::floor(px + rx * t)), static_cast<int>(std::floor(py + ry * t))};
    };
    auto prev = cell(0);
    for (double t = 0.01;; t += 0.01) {
        auto c = cell(t);
        // A diagonal jump may have clipped a corner cell; resample that step finely.
        if (c.first != prev.first && c.second != prev.second)
            for (double u = t - 0.01; u < t; u += 1e-6) {
                const auto f = cell(u);
                if (g.is_wall(f.first, f.second)) return u * (rx * dx + ry * dy);
            }
        if (g.is_wall(c.first, c.second)) return t * (rx * dx + ry * dy);
        prev = c;
    }
}

RenderOptions all_buffers(int w = 160, int h = 120) {
    RenderOptions o;
    o.width = w;
    o.height = h;
    o.depth_enabled = o.labels_enabled = o.automap_enabled = true;
    return o;
}

}  // namespace

TEST_CASE("buffer sizes follow the options") {
    WorldState w = world_from(kCorridor, 2);
    RenderOptions o;
    FrameBundle f = render_frame(w, 0, o);
    CHECK(f.screen.size() == 320u * 240u * 3u);
    CHECK_FALSE(f.depth.has_value());
    CHECK_FALSE(f.labels.has_value());
    CHECK_FALSE(f.automap.has_value());
    o.format = ScreenFormat::gray8;
    o.width = 97;
    o.height = 31;
    o.depth_enabled = o.labels_enabled = o.automap_enabled = true;
    f = render_frame(w, 0, o);
    CHECK(f.screen.size() == 97u * 31u);
    CHECK(f.depth->size() == 97u * 31u);
    CHECK(f.labels->size() == 97u * 31u);
    CHECK(f.automap->size() == 97u * 31u);
    o.width = 0;
    CHECK_THROWS_AS(render_frame(w, 0, o), ContractViolation);
}

TEST_CASE("no visible entities leaves the label buffer empty") {
    WorldState w = world_from(kRoom3, 1);
    const FrameBundle f = render_frame(w, 0, all_buffers());
    CHECK(f.label_entries.empty());
    for (auto v : *f.labels) REQUIRE(v == 0);
}

TEST_CASE("centre column matches the ray-march oracle in a 3x3 room") {
    WorldState w = world_from(kRoom3, 1);
    const FrameBundle f = render_frame(w, 0, all_buffers(161, 120));
    // Viewer at the centre of cell 2 facing +x; the wall face is at x = 512.
    const double oracle = ray_march_cells(*w.grid, 320, 320, 0, 80, 161);
    CHECK(std::abs(f.column_distance[80] / 128 - oracle) <= 0.02);
    CHECK(f.column_distance[80] == doctest::Approx(512 - 320).epsilon(1e-9));
}

TEST_CASE("DDA distances agree with ray marching over random poses") {
    const ScenarioConfig cfg = default_config();
    const MapGrid g = parse_map(cfg.map_text);
    std::mt19937_64 gen(21);
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
        const Vec2 p = random_floor_point(g, gen);
        const double angle = std::uniform_real_distribution<double>(0, 6.283185307179586)(gen);
        const int column = static_cast<int>(gen() % 320);
        const ColumnHit hit = cast_column(g, p.x.to_double(), p.y.to_double(), angle, column, 320);
        const double oracle = ray_march_cells(g, p.x.to_double(), p.y.to_double(), angle, column, 320);
        const double err = std::abs(hit.distance / 128 - oracle);
        worst = std::max(worst, err);
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("facing a flat wall gives symmetric column heights peaking at the centre") {
    const std::string_view map =
        "######\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#S...#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "#....#\n"
        "######\n";
    // The far wall is 3.5 cells ahead and spans the whole field of view.
    WorldState w = world_from(map, 1);
    REQUIRE(w.actors[0].pos == at_units(192, 7 * 128 + 64));
    for (int width : {160, 161, 320}) {
        RenderOptions o = all_buffers(width, 120);
        const FrameBundle f = render_frame(w, 0, o);
        const auto& d = f.column_distance;
        for (int c = 0; c < width; ++c) {
            REQUIRE(std::abs(d[c] - d[width - 1 - c]) <= 1e-9 * d[c]);
            REQUIRE(d[c] >= d[width / 2] - 1e-9);
        }
        // Wall pixel spans on screen mirror too.
        const auto& depth = *f.depth;
        for (int c = 0; c < width; ++c) {
            int span_a = 0, span_b = 0;
            const std::uint8_t ba = quantize_depth(d[c]), bb = quantize_depth(d[width - 1 - c]);
            for (int y = 0; y < o.height; ++y) {
                span_a += depth[y * width + c] == ba && f.screen[(y * width + c) * 3] != f.screen[c * 3];
                span_b += depth[y * width + (width - 1 - c)] == bb &&
                          f.screen[(y * width + width - 1 - c) * 3] != f.screen[(width - 1 - c) * 3];
            }
            REQUIRE(span_a == span_b);
        }
    }
}

TEST_CASE("depth quantization is monotone and clamped") {
    CHECK(quantize_depth(0) == 0);
    CHECK(quantize_depth(3.9) == 0);
    CHECK(quantize_depth(4.0) == 1);
    CHECK(quantize_depth(2040) == 255);
    CHECK(quantize_depth(1e9) == 255);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> d(0, 3000);
    for (int i = 0; i < 100000; ++i) {
        double a = d(gen), b = d(gen);
        if (a > b) std::swap(a, b);
        REQUIRE(quantize_depth(a) <= quantize_depth(b));
    }
}

TEST_CASE("label pixels are always in front of the column wall") {
    const ScenarioConfig cfg = default_config();
    WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 6, 3);
    std::mt19937_64 gen(8);
    int labelled = 0;
    for (int frame = 0; frame < 100; ++frame) {
        scatter(w, gen);
        const FrameBundle f = render_frame(w, frame % 6, all_buffers());
        const auto& lab = *f.labels;
        const auto& dep = *f.depth;
        for (int y = 0; y < f.height; ++y)
            for (int x = 0; x < f.width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
                if (!lab[i]) continue;
                ++labelled;
                REQUIRE(dep[i] < quantize_depth(f.column_distance[x]));
            }
        // Bounding boxes are tight around each value's pixels.
        for (const auto& e : f.label_entries) {
            int x0 = f.width, y0 = f.height, x1 = -1, y1 = -1;
            for (int y = 0; y < f.height; ++y)
                for (int x = 0; x < f.width; ++x)
                    if (lab[static_cast<std::size_t>(y) * f.width + x] == e.value) {
                        x0 = std::min(x0, x);
                        y0 = std::min(y0, y);
                        x1 = std::max(x1, x);
                        y1 = std::max(y1, y);
                    }
            REQUIRE(e.x == x0);
            REQUIRE(e.y == y0);
            REQUIRE(e.w == x1 - x0 + 1);
            REQUIRE(e.h == y1 - y0 + 1);
        }
    }
    CHECK(labelled > 0);
}

TEST_CASE("labels are assigned nearest first") {
    WorldState w = world_from(kCorridor, 3);
    w.actors[0].pos = at_units(192, 192);
    w.actors[1].pos = at_units(900, 236);
    w.actors[2].pos = at_units(500, 150);
    const FrameBundle f = render_frame(w, 0, all_buffers());
    REQUIRE(f.label_entries.size() == 2);
    CHECK(f.label_entries[0].object_id == 2u);
    CHECK(f.label_entries[0].value == 1);
    CHECK(f.label_entries[0].name == "Actor");
    CHECK(f.label_entries[0].pos_x == 500);
    CHECK(f.label_entries[1].object_id == 1u);
    CHECK(f.label_entries[1].value == 2);
}

TEST_CASE("actors passing the visibility test appear in the labels") {
    WorldState w = world_from(kPillars, 2);
    std::mt19937_64 gen(17);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        scatter(w, gen);
        if (!visibility_test(w, 0, 1)) continue;
        const FrameBundle f = render_frame(w, 0, all_buffers());
        // Projected width: 2 * radius * focal / depth.
        const double dx = w.actors[1].pos.x.to_double() - w.actors[0].pos.x.to_double();
        const double dy = w.actors[1].pos.y.to_double() - w.actors[0].pos.y.to_double();
        const double a = w.actors[0].angle.to_radians();
        const double depth = dx * std::cos(a) + dy * std::sin(a);
        if (depth < 1 || 2 * kSpriteRadius * 80 / depth < 1) continue;
        ++checked;
        bool found = false;
        for (const auto& e : f.label_entries) found = found || e.object_id == 1u;
        INFO("pose " << i);
        CHECK(found);
    }
    CHECK(checked > 200);
}

TEST_CASE("serial and parallel renderers are byte identical") {
    const ScenarioConfig cfg = default_config();
    WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 4, 9);
    w.track_discovery = true;
    std::mt19937_64 gen(4);
    for (int frame = 0; frame < 20; ++frame) {
        scatter(w, gen);
        for (const auto& a : w.actors) update_discovery(w, a.id);
        RenderOptions o = all_buffers(133, 77);
        o.hud = o.crosshair = true;
        o.format = frame % 2 ? ScreenFormat::gray8 : ScreenFormat::rgb24;
        const FrameBundle a = render_frame(w, frame % 4, o);
        const FrameBundle b = render_frame_parallel(w, frame % 4, o);
        REQUIRE(a.screen == b.screen);
        REQUIRE(a.depth == b.depth);
        REQUIRE(a.labels == b.labels);
        REQUIRE(a.automap == b.automap);
        REQUIRE(a.label_entries.size() == b.label_entries.size());
    }
}

TEST_CASE("rendering does not mutate the world") {
    const ScenarioConfig cfg = default_config();
    WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 4, 9);
    w.track_discovery = true;
    update_discovery(w, 0);
    const auto hash = state_hash(w);
    const auto seen = w.discovered;
    render_frame(w, 0, all_buffers());
    CHECK(state_hash(w) == hash);
    CHECK(w.discovered == seen);
}

TEST_CASE("HUD and crosshair stay out of depth and labels") {
    WorldState w = world_from(kCorridor, 2);
    RenderOptions plain = all_buffers();
    RenderOptions decorated = plain;
    decorated.hud = decorated.crosshair = true;
    const FrameBundle a = render_frame(w, 0, plain);
    const FrameBundle b = render_frame(w, 0, decorated);
    CHECK(a.depth == b.depth);
    CHECK(a.labels == b.labels);
    CHECK(a.screen != b.screen);
}

TEST_CASE("automap in full mode draws every wall cell") {
    const ScenarioConfig cfg = default_config();
    WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 1, 1);
    RenderOptions o = all_buffers(320, 240);
    o.automap_full = true;
    const auto map = render_automap(w, 0, o);
    const AutomapTransform t = automap_transform(*w.grid, o);
    const MapGrid& g = *w.grid;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            const int px = static_cast<int>(t.off_x + (x + 0.5) * t.scale);
            const int py = static_cast<int>(t.off_y + (y + 0.5) * t.scale);
            const std::uint8_t* p = &map[(static_cast<std::size_t>(py) * o.width + px) * 3];
            const bool wall_colored = p[0] == kAutomapWall[0] && p[1] == kAutomapWall[1] && p[2] == kAutomapWall[2];
            REQUIRE(wall_colored == g.is_wall(x, y));
        }
    // Viewer marker.
    const int vx = static_cast<int>(t.off_x + w.actors[0].pos.x.to_double() / 128 * t.scale);
    const int vy = static_cast<int>(t.off_y + w.actors[0].pos.y.to_double() / 128 * t.scale);
    const std::uint8_t* p = &map[(static_cast<std::size_t>(vy) * o.width + vx) * 3];
    CHECK(p[0] == kAutomapViewer[0]);
    CHECK(p[1] == kAutomapViewer[1]);
    CHECK(p[2] == kAutomapViewer[2]);
}

TEST_CASE("discovered cells at tic 0 match a float ray-march of the view cone") {
    const ScenarioConfig cfg = default_config();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 1, 1);
        std::mt19937_64 gen(seed);
        scatter(w, gen);
        update_discovery(w, 0);
        const MapGrid& g = *w.grid;
        std::set<std::pair<int, int>> oracle;
        const double half = w.constants.half_fov.to_radians();
        const double px = w.actors[0].pos.x.to_double() / 128, py = w.actors[0].pos.y.to_double() / 128;
        for (int i = 0; i < kDiscoveryRays; ++i) {
            const double a = w.actors[0].angle.to_radians() + (2.0 * i + 1 - kDiscoveryRays) * half / kDiscoveryRays;
            for (double t = 0;; t += 0.001) {
                const int cx = static_cast<int>(std::floor(px + std::cos(a) * t));
                const int cy = static_cast<int>(std::floor(py + std::sin(a) * t));
                oracle.insert({cx, cy});
                if (g.is_wall(cx, cy)) break;
            }
        }
        std::set<std::pair<int, int>> seen;
        for (int y = 0; y < g.height; ++y)
            for (int x = 0; x < g.width; ++x)
                if (w.discovered[0][static_cast<std::size_t>(y) * g.width + x]) seen.insert({x, y});
        // Corner grazes may differ between the fixed-point walk and the march.
        std::size_t diff = 0;
        for (const auto& c : oracle) diff += !seen.count(c);
        for (const auto& c : seen) diff += !oracle.count(c);
        INFO("seed " << seed);
        CHECK(diff <= 2);
        CHECK(seen.count({static_cast<int>(px), static_cast<int>(py)}) == 1);
    }
}

TEST_CASE("automap in discovered mode hides unseen walls") {
    const ScenarioConfig cfg = default_config();
    WorldState w = make_world(std::make_shared<const MapGrid>(parse_map(cfg.map_text)), 1, 1);
    w.track_discovery = true;
    update_discovery(w, 0);
    RenderOptions o = all_buffers(320, 240);
    const auto partial = render_automap(w, 0, o);
    const AutomapTransform t = automap_transform(*w.grid, o);
    const MapGrid& g = *w.grid;
    int hidden = 0, shown = 0;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            if (!g.is_wall(x, y)) continue;
            const int px = static_cast<int>(t.off_x + (x + 0.5) * t.scale);
            const int py = static_cast<int>(t.off_y + (y + 0.5) * t.scale);
            const bool drawn = partial[(static_cast<std::size_t>(py) * o.width + px) * 3] == kAutomapWall[0];
            const bool known = w.discovered[0][static_cast<std::size_t>(y) * g.width + x] != 0;
            REQUIRE(drawn == known);
            (drawn ? shown : hidden)++;
        }
    CHECK(shown > 0);
    CHECK(hidden > 0);
}

TEST_CASE("bench reports a per-buffer breakdown") {
    RenderOptions o;
    o.width = 64;
    o.height = 48;
    const BenchReport r = bench(o, 50);
    CHECK(r.frames == 50);
    CHECK(r.fps > 0);
    CHECK(r.fps_all_buffers > 0);
    CHECK(r.fps_all_buffers < r.fps);
    CHECK_THROWS_AS(bench(o, 0), ContractViolation);
}

TEST_CASE("image export writes binary PPM and PGM") {
    const auto dir = std::filesystem::temp_directory_path();
    write_ppm(dir / "pa_test.ppm", 2, 1, {1, 2, 3, 4, 5, 6});
    write_pgm(dir / "pa_test.pgm", 2, 1, {7, 8});
    std::ifstream ppm(dir / "pa_test.ppm", std::ios::binary);
    const std::string p((std::istreambuf_iterator<char>(ppm)), {});
    CHECK(p == std::string("P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06", 17));
    std::ifstream pgm(dir / "pa_test.pgm", std::ios::binary);
    const std::string g((std::istreambuf_iterator<char>(pgm)), {});
    CHECK(g == std::string("P5\n2 1\n255\n\x07\x08", 13));
}
