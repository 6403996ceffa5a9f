#pragma once

#include "uscut/config.hpp"
#include "uscut/flow_graph.hpp"
#include "uscut/imaging.hpp"
#include "uscut/max_flow.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace uscut {

/// User-placed point inside the lesion; the template is centred on it.
struct SeedPoint {
    double x = 0.0;
    double y = 0.0;

    Point2 point() const noexcept { return {x, y}; }
    friend bool operator==(const SeedPoint&, const SeedPoint&) = default;
};

/// User-placed point on the lesion border that pins the cut on its nearest ray.
struct HelperSeed {
    double x = 0.0;
    double y = 0.0;

    Point2 point() const noexcept { return {x, y}; }
    friend bool operator==(const HelperSeed&, const HelperSeed&) = default;
};

/// Gray-value model of the lesion around the seed.
struct IntensityStats {
    double mean = 0.0;
    /// Mean absolute deviation of the seed-disk pixels from `mean`.
    double deviation = 0.0;
    /// max(tolerance_factor * deviation, outside_floor)
    double tolerance = 0.0;
};

struct RaySample {
    double radius;
    double intensity;
};

/// Template radius for a seed: distance to the nearest image border, limited
/// by cfg.max_radius_cap and never below one pixel.
double template_radius(const GrayImage& image, SeedPoint seed, const TemplateConfig& cfg);

/// Mean and mean absolute deviation over pixels whose centers lie within
/// seed_disk_radius of the seed. Throws InvalidArgument for a seed outside the image.
IntensityStats estimate_intensity(const GrayImage& image, SeedPoint seed, const TemplateConfig& cfg);

/// cfg.samples bilinear samples at radii (s+1) * R / S, s = 0..S-1, where R is template_radius().
std::vector<RaySample> sample_ray(const GrayImage& image, SeedPoint seed, double angle, const TemplateConfig& cfg);

/// Circular-template flow graph plus the bookkeeping needed to read a cut back.
///
/// Node n(r, s) = r * samples + s; the source and sink follow the R*S sample nodes.
/// A node on the source side is labelled lesion.
struct TemplateGraph {
    int rays = 0;
    int samples = 0;
    int smoothness = 0;
    double max_radius = 0.0;
    graph::FlowGraph graph{2, 0, 1};
    /// Interpolated gray value per node, index n(r, s).
    std::vector<double> intensity;
    /// Edge index of source -> n(r, s) (capacity cost_out) and n(r, s) -> sink (cost_in).
    std::vector<std::size_t> source_edge;
    std::vector<std::size_t> sink_edge;

    graph::NodeId node(int ray, int sample) const noexcept { return ray * samples + sample; }
    double step() const noexcept { return max_radius / samples; }
    double radius(int sample) const noexcept { return (sample + 1) * step(); }
    double angle(int ray) const noexcept;
};

/// Costs of labelling a sample lesion (|g - m|) and background (max(0, tau - |g - m|)).
/// Values below 1e-6 are flushed to zero.
struct SampleCosts {
    double inside;
    double outside;
};
SampleCosts sample_costs(double intensity, const IntensityStats& stats) noexcept;

/// Builds the template graph: terminal edges per node, inward infinite
/// edges along each ray, infinite source anchors on the first sample,
/// infinite inter-ray edges n(r,s) -> n(r+-1, max(0, s - delta)), then helper clamps.
///
/// Only the geometric invariants needed by the graph are checked here
/// (rays >= 3, samples >= 1, 0 <= delta < samples), so tiny templates can be
/// built for exhaustive checks; segment() enforces the full TemplateConfig.
TemplateGraph build_template_graph(const GrayImage& image, SeedPoint seed, const IntensityStats& stats,
                                   std::span<const HelperSeed> helpers, const TemplateConfig& cfg);

/// Pins the nearest ray (by angle) of every helper: samples at radius <= rho
/// are forced to the lesion side and samples beyond it to the background.
/// The first sample always stays lesion. Throws InvalidArgument for a helper
/// coincident with the seed.
void apply_helper_seeds(TemplateGraph& tg, std::span<const HelperSeed> helpers, SeedPoint seed);

/// Nearest ray index and radius of a helper relative to the seed.
struct HelperPlacement {
    int ray;
    double radius;
};
HelperPlacement locate_helper(HelperSeed helper, SeedPoint seed, int rays);

struct RayCut {
    /// Number of lesion samples per ray, 1..samples.
    std::vector<int> cut_index;
    std::vector<double> cut_radius;
    ContourPolygon contour;
};

/// Reads the per-ray cut out of a partition. The boundary sits midway between
/// the last lesion sample and the next one; a ray cut at its last sample is
/// placed on the template rim. Throws InvariantViolation when the lesion
/// samples of some ray do not form a prefix.
RayCut extract_contour(const graph::CutResult& cut, const TemplateGraph& tg, SeedPoint seed);

/// Sum of sample costs for a per-ray cut-index vector (the cut's energy).
double template_energy(const TemplateGraph& tg, const IntensityStats& stats, std::span<const int> cut_index);

} // namespace uscut
