#include "uscut/template_cut.hpp"

#include "uscut/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace uscut {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinCapacity = 1e-6;

void require_inside(const GrayImage& image, double x, double y, const char* what)
{
    if (!std::isfinite(x) || !std::isfinite(y) || !image.contains(x, y)) {
        throw InvalidArgument(std::string(what) + " outside image");
    }
}

double flush(double v) noexcept
{
    return v < kMinCapacity ? 0.0 : v;
}

} // namespace

double TemplateGraph::angle(int ray) const noexcept
{
    return kTwoPi * ray / rays;
}

double template_radius(const GrayImage& image, SeedPoint seed, const TemplateConfig& cfg)
{
    double r = std::min({seed.x, seed.y, (image.width() - 1) - seed.x, (image.height() - 1) - seed.y});
    if (cfg.max_radius_cap) {
        r = std::min(r, *cfg.max_radius_cap);
    }
    return std::max(r, 1.0);
}

IntensityStats estimate_intensity(const GrayImage& image, SeedPoint seed, const TemplateConfig& cfg)
{
    require_inside(image, seed.x, seed.y, "seed");
    const double rho = cfg.seed_disk_radius;
    const double rho2 = rho * rho;
    const int x_lo = std::max(0, static_cast<int>(std::ceil(seed.x - rho)));
    const int x_hi = std::min(image.width() - 1, static_cast<int>(std::floor(seed.x + rho)));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(seed.y - rho)));
    const int y_hi = std::min(image.height() - 1, static_cast<int>(std::floor(seed.y + rho)));

    std::vector<double> values;
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - seed.x;
            const double dy = y - seed.y;
            if (dx * dx + dy * dy <= rho2) {
                values.push_back(image.at(x, y));
            }
        }
    }
    if (values.empty()) {
        throw InvalidArgument("seed disk contains no pixel centers");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    IntensityStats stats;
    stats.mean = sum / static_cast<double>(values.size());
    double dev = 0.0;
    for (double v : values) {
        dev += std::abs(v - stats.mean);
    }
    stats.deviation = dev / static_cast<double>(values.size());
    stats.tolerance = std::max(cfg.tolerance_factor * stats.deviation, cfg.outside_floor);
    return stats;
}

std::vector<RaySample> sample_ray(const GrayImage& image, SeedPoint seed, double angle, const TemplateConfig& cfg)
{
    const double max_radius = template_radius(image, seed, cfg);
    const double step = max_radius / cfg.samples;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    std::vector<RaySample> out;
    out.reserve(static_cast<std::size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i) {
        const double r = (i + 1) * step;
        out.push_back({r, image.sample_bilinear(seed.x + r * c, seed.y + r * s)});
    }
    return out;
}

SampleCosts sample_costs(double intensity, const IntensityStats& stats) noexcept
{
    const double diff = std::abs(intensity - stats.mean);
    return {flush(diff), flush(std::max(0.0, stats.tolerance - diff))};
}

TemplateGraph build_template_graph(const GrayImage& image, SeedPoint seed, const IntensityStats& stats,
                                   std::span<const HelperSeed> helpers, const TemplateConfig& cfg)
{
    require_inside(image, seed.x, seed.y, "seed");
    if (cfg.rays < 3 || cfg.samples < 1 || cfg.smoothness < 0 || cfg.smoothness >= cfg.samples) {
        throw InvalidArgument("template geometry needs rays >= 3, samples >= 1 and 0 <= delta < samples");
    }
    const int R = cfg.rays;
    const int S = cfg.samples;
    const int node_count = R * S + 2;
    const graph::NodeId source = R * S;
    const graph::NodeId sink = R * S + 1;

    TemplateGraph tg;
    tg.rays = R;
    tg.samples = S;
    tg.smoothness = cfg.smoothness;
    tg.max_radius = template_radius(image, seed, cfg);
    tg.graph = graph::FlowGraph(node_count, source, sink);
    tg.intensity.resize(static_cast<std::size_t>(R * S));
    tg.source_edge.resize(static_cast<std::size_t>(R * S));
    tg.sink_edge.resize(static_cast<std::size_t>(R * S));

    for (int r = 0; r < R; ++r) {
        const double theta = tg.angle(r);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int i = 0; i < S; ++i) {
            const double radius = tg.radius(i);
            const auto n = static_cast<std::size_t>(tg.node(r, i));
            tg.intensity[n] = image.sample_bilinear(seed.x + radius * c, seed.y + radius * s);
        }
    }

    auto& g = tg.graph;
    for (int r = 0; r < R; ++r) {
        for (int i = 0; i < S; ++i) {
            const auto n = tg.node(r, i);
            const auto costs = sample_costs(tg.intensity[static_cast<std::size_t>(n)], stats);
            tg.source_edge[static_cast<std::size_t>(n)] = g.add_edge(source, n, costs.outside);
            tg.sink_edge[static_cast<std::size_t>(n)] = g.add_edge(n, sink, costs.inside);
        }
    }
    // A lesion sample implies every sample closer to the seed is lesion.
    for (int r = 0; r < R; ++r) {
        for (int i = 1; i < S; ++i) {
            g.add_edge(tg.node(r, i), tg.node(r, i - 1), graph::kInfinite);
        }
    }
    for (int r = 0; r < R; ++r) {
        g.add_edge(source, tg.node(r, 0), graph::kInfinite);
    }
    // |k_r - k_r'| <= delta for adjacent rays.
    for (int r = 0; r < R; ++r) {
        const int neighbours[2] = {(r + 1) % R, (r + R - 1) % R};
        for (const int nb : neighbours) {
            for (int i = 0; i < S; ++i) {
                g.add_edge(tg.node(r, i), tg.node(nb, std::max(0, i - cfg.smoothness)), graph::kInfinite);
            }
        }
    }

    apply_helper_seeds(tg, helpers, seed);
    return tg;
}

HelperPlacement locate_helper(HelperSeed helper, SeedPoint seed, int rays)
{
    const double dx = helper.x - seed.x;
    const double dy = helper.y - seed.y;
    const double radius = std::hypot(dx, dy);
    if (!(radius > 0.0)) {
        throw InvalidArgument("helper seed coincides with the center seed");
    }
    double theta = std::atan2(dy, dx);
    if (theta < 0.0) {
        theta += kTwoPi;
    }
    const int ray = static_cast<int>(std::lround(theta / (kTwoPi / rays))) % rays;
    return {ray, radius};
}

void apply_helper_seeds(TemplateGraph& tg, std::span<const HelperSeed> helpers, SeedPoint seed)
{
    for (const auto& helper : helpers) {
        const auto place = locate_helper(helper, seed, tg.rays);
        for (int i = 0; i < tg.samples; ++i) {
            const auto n = static_cast<std::size_t>(tg.node(place.ray, i));
            if (tg.radius(i) <= place.radius) {
                tg.graph.set_capacity(tg.source_edge[n], graph::kInfinite);
            } else if (i > 0) {
                tg.graph.set_capacity(tg.sink_edge[n], graph::kInfinite);
            }
        }
    }
}

RayCut extract_contour(const graph::CutResult& cut, const TemplateGraph& tg, SeedPoint seed)
{
    RayCut out;
    out.cut_index.resize(static_cast<std::size_t>(tg.rays));
    out.cut_radius.resize(static_cast<std::size_t>(tg.rays));
    out.contour.vertices.reserve(static_cast<std::size_t>(tg.rays));
    for (int r = 0; r < tg.rays; ++r) {
        int k = 0;
        while (k < tg.samples && cut.on_source_side(tg.node(r, k))) {
            ++k;
        }
        for (int i = k; i < tg.samples; ++i) {
            if (cut.on_source_side(tg.node(r, i))) {
                throw InvariantViolation("lesion samples on ray " + std::to_string(r) + " do not form a prefix");
            }
        }
        if (k == 0) {
            throw InvariantViolation("ray " + std::to_string(r) + " has no lesion sample");
        }
        const double radius = k == tg.samples ? tg.max_radius : tg.radius(k - 1) + 0.5 * tg.step();
        out.cut_index[static_cast<std::size_t>(r)] = k;
        out.cut_radius[static_cast<std::size_t>(r)] = radius;
        const double theta = tg.angle(r);
        out.contour.vertices.push_back({seed.x + radius * std::cos(theta), seed.y + radius * std::sin(theta)});
    }
    return out;
}

double template_energy(const TemplateGraph& tg, const IntensityStats& stats, std::span<const int> cut_index)
{
    double total = 0.0;
    for (int r = 0; r < tg.rays; ++r) {
        for (int i = 0; i < tg.samples; ++i) {
            const auto costs = sample_costs(tg.intensity[static_cast<std::size_t>(tg.node(r, i))], stats);
            total += i < cut_index[static_cast<std::size_t>(r)] ? costs.inside : costs.outside;
        }
    }
    return total;
}

} // namespace uscut
