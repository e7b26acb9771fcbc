// Serial reference renderer against the OpenMP column kernel on the same
// frames; also checks the two outputs match byte for byte.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "CLI11.hpp"
#include "pixelarena/cli.hpp"
#include "pixelarena/render.hpp"

using namespace pixelarena;

namespace {

template <class F>
double fps_of(int frames, F&& render) {
    const auto t0 = std::chrono::steady_clock::now();
    volatile std::uint8_t sink = 0;
    for (int i = 0; i < frames; ++i) sink = render(i).screen[0];
    (void)sink;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return frames / s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP renderer"};
    std::string resolution = "320x240";
    int frames = 500;
    bool all_buffers = false;
    app.add_option("--resolution", resolution);
    app.add_option("--frames", frames)->check(CLI::PositiveNumber);
    app.add_flag("--all-buffers", all_buffers);
    CLI11_PARSE(app, argc, argv);

    RenderOptions opts;
    try {
        std::tie(opts.width, opts.height) = cli::parse_resolution(resolution);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    opts.depth_enabled = opts.labels_enabled = opts.automap_enabled = all_buffers;

    WorldState world = bench_world();
    const int n = static_cast<int>(world.actors.size());
    for (int v = 0; v < n; ++v) {
        const FrameBundle a = render_frame(world, v, opts);
        const FrameBundle b = render_frame_parallel(world, v, opts);
        if (a.screen != b.screen || a.depth != b.depth || a.labels != b.labels || a.automap != b.automap) {
            std::fprintf(stderr, "error: parallel output differs from serial for viewer %d\n", v);
            return 1;
        }
    }
    const double serial = fps_of(frames, [&](int i) { return render_frame(world, i % n, opts); });
    const double parallel = fps_of(frames, [&](int i) { return render_frame_parallel(world, i % n, opts); });
    std::printf("resolution %dx%d frames %d threads %d serial_fps %.1f parallel_fps %.1f speedup %.2f identical yes\n",
                opts.width, opts.height, frames, omp_get_max_threads(), serial, parallel, parallel / serial);
    return 0;
}
