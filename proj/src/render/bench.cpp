#include <chrono>

#include "pixelarena/render.hpp"
#include "pixelarena/scenario.hpp"

namespace pixelarena {

WorldState bench_world() {
    const ScenarioConfig cfg = default_config();
    auto grid = std::make_shared<const MapGrid>(parse_map(cfg.map_text));
    WorldState world = make_world(grid, 4, 12345, cfg.rules());
    world.track_discovery = true;
    for (const auto& a : world.actors) update_discovery(world, a.id);
    return world;
}

namespace {

// Mean milliseconds per frame while the viewer turns a full circle.
double time_frames(WorldState world, const RenderOptions& opts, int frames) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    std::size_t sink = 0;
    for (int i = 0; i < frames; ++i) {
        world.actors[0].angle = Angle::from_degrees(360.0 * i / frames);
        const FrameBundle f = render_frame(world, 0, opts);
        sink += f.screen[static_cast<std::size_t>(i) % f.screen.size()];
    }
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    // Keep the frames observable.
    if (sink == static_cast<std::size_t>(-1)) return 0;
    return ms / frames;
}

}  // namespace

BenchReport bench(const RenderOptions& opts, int frames) {
    if (frames < 1) throw ContractViolation("bench needs at least one frame");
    const WorldState world = bench_world();
    RenderOptions screen_only = opts;
    screen_only.depth_enabled = screen_only.labels_enabled = screen_only.automap_enabled = false;
    BenchReport r;
    r.width = opts.width;
    r.height = opts.height;
    r.frames = frames;
    time_frames(world, screen_only, std::min(frames, 50));  // warm-up
    r.ms_screen = time_frames(world, screen_only, frames);
    RenderOptions o = screen_only;
    o.depth_enabled = true;
    r.ms_depth = time_frames(world, o, frames) - r.ms_screen;
    o = screen_only;
    o.labels_enabled = true;
    r.ms_labels = time_frames(world, o, frames) - r.ms_screen;
    o = screen_only;
    o.automap_enabled = true;
    r.ms_automap = time_frames(world, o, frames) - r.ms_screen;
    o.depth_enabled = o.labels_enabled = true;
    const double ms_all = time_frames(world, o, frames);
    r.fps = 1000.0 / r.ms_screen;
    r.fps_all_buffers = 1000.0 / ms_all;
    return r;
}

}  // namespace pixelarena
