#include "frame_plan.hpp"

namespace pixelarena {

FrameBundle render_frame_parallel(const WorldState& world, int viewer_id, const RenderOptions& opts) {
    FrameBundle out;
    const detail::FramePlan plan = detail::make_plan(world, viewer_id, opts, out);
    // Columns write disjoint pixels.
#pragma omp parallel for schedule(static)
    for (int x = 0; x < opts.width; ++x) detail::render_column(plan, x);
    detail::finish_frame(world, viewer_id, plan);
    return out;
}

}  // namespace pixelarena
