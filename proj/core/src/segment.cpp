#include "uscut/segment.hpp"

#include "uscut/error.hpp"
#include "uscut/max_flow.hpp"
#include "uscut/metrics.hpp"

#include <chrono>

namespace uscut {

SegmentationResult segment(const GrayImage& image, SeedPoint seed, std::span<const HelperSeed> helpers,
                           const TemplateConfig& cfg)
{
    cfg.validate();
    if (!image.contains(seed.x, seed.y)) {
        throw InvalidArgument("seed outside image");
    }
    for (const auto& h : helpers) {
        if (!image.contains(h.x, h.y)) {
            throw InvalidArgument("helper seed outside image");
        }
    }

    const auto start = std::chrono::steady_clock::now();

    SegmentationResult result;
    result.stats = estimate_intensity(image, seed, cfg);
    const TemplateGraph tg = build_template_graph(image, seed, result.stats, helpers, cfg);
    graph::CutResult cut;
    try {
        cut = graph::min_st_cut(tg.graph);
    } catch (const InfeasibleCut&) {
        if (helpers.empty()) {
            throw;
        }
        throw InvalidArgument("helper seeds conflict with each other or with the smoothness constraint");
    }
    RayCut rays = extract_contour(cut, tg, seed);

    result.max_radius = tg.max_radius;
    result.cut_cost = cut.flow_value;
    result.cut_index = std::move(rays.cut_index);
    result.cut_radius = std::move(rays.cut_radius);
    result.contour = std::move(rays.contour);
    result.mask = rasterize(result.contour, image.width(), image.height());

    // Tiny contours can miss every pixel center; fall back to the polygon itself.
    const auto boundary = boundary_points(result.mask);
    const auto d = boundary.size() >= 2 ? metrics::diameters(boundary, image.spacing())
                                        : metrics::diameters(result.contour.vertices, image.spacing());
    result.diameter_a = d.a;
    result.diameter_b = d.b;
    result.axis_a = d.axis_a;

    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace uscut
