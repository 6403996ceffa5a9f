#include "oracles.hpp"

#include "uscut/error.hpp"
#include "uscut/max_flow.hpp"
#include "uscut/template_cut.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace uscut;

namespace {

GrayImage random_image(std::mt19937& rng, int w, int h, int lo = 0, int hi = 255)
{
    std::uniform_int_distribution<int> v(lo, hi);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
    for (auto& p : px) {
        p = static_cast<std::uint8_t>(v(rng));
    }
    return GrayImage(w, h, std::move(px));
}

TemplateConfig tiny(int rays, int samples, int delta)
{
    TemplateConfig cfg;
    cfg.rays = rays;
    cfg.samples = samples;
    cfg.smoothness = delta;
    return cfg;
}

// Intensities recomputed from first principles: border distance, ray angle 2*pi*r/R, radius (s+1)*R/S.
} // namespace

TEST(EstimateIntensity, ConstantImage)
{
    const GrayImage img(20, 20, std::uint8_t{100});
    const auto st = estimate_intensity(img, {10, 10}, TemplateConfig{});
    EXPECT_DOUBLE_EQ(st.mean, 100.0);
    EXPECT_DOUBLE_EQ(st.deviation, 0.0);
    EXPECT_DOUBLE_EQ(st.tolerance, 5.0);
}

TEST(EstimateIntensity, ThreeValueDiskWithFactorOnePointFive)
{
    // rho0 = 1 around (1, 0) on a 3x1 strip covers exactly {90, 100, 110}.
    const GrayImage img(3, 1, std::vector<std::uint8_t>{90, 100, 110});
    TemplateConfig cfg;
    cfg.seed_disk_radius = 1.0;
    cfg.tolerance_factor = 1.5;
    const auto st = estimate_intensity(img, {1, 0}, cfg);
    EXPECT_DOUBLE_EQ(st.mean, 100.0);
    EXPECT_NEAR(st.deviation, 20.0 / 3.0, 1e-12);
    EXPECT_NEAR(st.tolerance, 10.0, 1e-12);
}

TEST(EstimateIntensity, MatchesExhaustivePixelScan)
{
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> pos(0.0, 15.0);
    for (int trial = 0; trial < 200; ++trial) {
        const GrayImage img = random_image(rng, 16, 16);
        const SeedPoint seed = trial == 0 ? SeedPoint{8, 8} : SeedPoint{pos(rng), pos(rng)};
        TemplateConfig cfg;
        const auto st = estimate_intensity(img, seed, cfg);
        const auto want = oracle::disk_stats(img, seed.x, seed.y, cfg.seed_disk_radius);
        ASSERT_NEAR(st.mean, want.mean, 1e-9);
        ASSERT_NEAR(st.deviation, want.deviation, 1e-9);
        ASSERT_NEAR(st.tolerance, std::max(cfg.tolerance_factor * want.deviation, cfg.outside_floor), 1e-9);
    }
}

TEST(EstimateIntensity, SeedOutsideImageThrows)
{
    const GrayImage img(10, 10, std::uint8_t{1});
    EXPECT_THROW(estimate_intensity(img, {10.5, 3}, TemplateConfig{}), InvalidArgument);
    EXPECT_THROW(estimate_intensity(img, {-0.1, 3}, TemplateConfig{}), InvalidArgument);
}

TEST(SampleRay, ConstantImage)
{
    const GrayImage img(50, 50, std::uint8_t{77});
    for (const auto& s : sample_ray(img, {20.3, 30.1}, 1.234, TemplateConfig{})) {
        EXPECT_DOUBLE_EQ(s.intensity, 77.0);
    }
}

TEST(SampleRay, LatticePointsAlongAngleZero)
{
    std::mt19937 rng(22);
    const GrayImage img = random_image(rng, 21, 21);
    TemplateConfig cfg;
    cfg.samples = 10;
    cfg.max_radius_cap = 10.0;
    const auto samples = sample_ray(img, {10, 10}, 0.0, cfg);
    ASSERT_EQ(samples.size(), 10u);
    for (int s = 0; s < 10; ++s) {
        EXPECT_DOUBLE_EQ(samples[static_cast<std::size_t>(s)].radius, s + 1.0);
        EXPECT_DOUBLE_EQ(samples[static_cast<std::size_t>(s)].intensity, img.at(10 + s + 1, 10));
    }
}

TEST(SampleRay, LinearRampIsExact)
{
    std::vector<std::uint8_t> px(200 * 200);
    for (int y = 0; y < 200; ++y) {
        for (int x = 0; x < 200; ++x) {
            px[static_cast<std::size_t>(y * 200 + x)] = static_cast<std::uint8_t>(x);
        }
    }
    const GrayImage img(200, 200, std::move(px));
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> pos(40.0, 160.0);
    for (int trial = 0; trial < 100; ++trial) {
        const SeedPoint seed{pos(rng), pos(rng)};
        const double a = ang(rng);
        for (const auto& s : sample_ray(img, seed, a, TemplateConfig{})) {
            ASSERT_NEAR(s.intensity, seed.x + s.radius * std::cos(a), 1e-9);
        }
    }
}

TEST(TemplateRadius, BorderDistanceCapAndFloor)
{
    const GrayImage img(100, 60, std::uint8_t{0});
    TemplateConfig cfg;
    EXPECT_DOUBLE_EQ(template_radius(img, {30, 20}, cfg), 20.0);
    EXPECT_DOUBLE_EQ(template_radius(img, {90, 30}, cfg), 9.0);
    cfg.max_radius_cap = 5.0;
    EXPECT_DOUBLE_EQ(template_radius(img, {30, 20}, cfg), 5.0);
    EXPECT_DOUBLE_EQ(template_radius(img, {0, 20}, TemplateConfig{}), 1.0);
}

TEST(BuildTemplateGraph, EdgeCountsForEightByFour)
{
    const GrayImage img(40, 40, std::uint8_t{50});
    const auto cfg = tiny(8, 4, 1);
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    const auto tg = build_template_graph(img, {20, 20}, st, {}, cfg);
    EXPECT_EQ(tg.graph.node_count(), 34);
    int terminal = 0;
    int intra = 0;
    int anchors = 0;
    int inter = 0;
    for (const auto& e : tg.graph.edges()) {
        const bool from_s = e.from == tg.graph.source();
        const bool to_t = e.to == tg.graph.sink();
        if (!e.infinite()) {
            ++terminal;
            EXPECT_TRUE(from_s || to_t);
        } else if (from_s) {
            ++anchors;
            EXPECT_EQ(e.to % 4, 0);
        } else if (e.from / 4 == e.to / 4) {
            ++intra;
            EXPECT_EQ(e.to, e.from - 1);
        } else {
            ++inter;
            EXPECT_EQ(e.to % 4, std::max(0, e.from % 4 - 1));
            const int dr = (e.to / 4 - e.from / 4 + 8) % 8;
            EXPECT_TRUE(dr == 1 || dr == 7);
        }
    }
    EXPECT_EQ(terminal, 64);
    EXPECT_EQ(intra, 24);
    EXPECT_EQ(anchors, 8);
    EXPECT_EQ(inter, 64);
}

TEST(BuildTemplateGraph, ConstantImageCosts)
{
    const GrayImage img(40, 40, std::uint8_t{50});
    const auto cfg = tiny(8, 4, 1);
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    const auto tg = build_template_graph(img, {20, 20}, st, {}, cfg);
    for (int n = 0; n < 32; ++n) {
        EXPECT_EQ(tg.graph.edges()[tg.sink_edge[static_cast<std::size_t>(n)]].capacity, 0.0);
        EXPECT_EQ(tg.graph.edges()[tg.source_edge[static_cast<std::size_t>(n)]].capacity, st.tolerance);
    }
}

TEST(BuildTemplateGraph, TinyTemplatesAreOptimal)
{
    std::mt19937 rng(24);
    std::uniform_int_distribution<int> rays(3, 4);
    std::uniform_int_distribution<int> samples(1, 4);
    std::uniform_real_distribution<double> pos(4.0, 11.0);
    std::uniform_real_distribution<double> factor(0.5, 6.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int R = rays(rng);
        const int S = samples(rng);
        const int D = std::uniform_int_distribution<int>(0, S - 1)(rng);
        auto cfg = tiny(R, S, D);
        cfg.tolerance_factor = factor(rng);
        const GrayImage img = random_image(rng, 16, 16, 40, 200);
        const SeedPoint seed{pos(rng), pos(rng)};
        const auto st = estimate_intensity(img, seed, cfg);
        const auto tg = build_template_graph(img, seed, st, {}, cfg);
        const auto cut = graph::min_st_cut(tg.graph);
        const auto rc = extract_contour(cut, tg, seed);

        const auto g = oracle::template_intensities(img, seed.x, seed.y, R, S);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ASSERT_NEAR(tg.intensity[i], g[i], 1e-9);
        }
        const auto best = oracle::enumerate_template(g, R, S, D, st.mean, st.tolerance);
        ASSERT_NEAR(cut.flow_value, best.energy, 1e-9) << "trial " << trial;
        ASSERT_NEAR(oracle::template_cost(g, R, S, st.mean, st.tolerance, rc.cut_index), best.energy, 1e-9);
        for (int r = 0; r < R; ++r) {
            ASSERT_LE(std::abs(rc.cut_index[r] - rc.cut_index[(r + 1) % R]), D);
        }
    }
}

TEST(ExtractContour, AllSourceSideHugsTheRim)
{
    const GrayImage img(41, 41, std::uint8_t{0});
    const auto cfg = tiny(8, 4, 1);
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    const auto tg = build_template_graph(img, {20, 20}, st, {}, cfg);
    graph::CutResult cut;
    cut.side.assign(34, graph::Side::source);
    cut.side[33] = graph::Side::sink;
    const auto rc = extract_contour(cut, tg, {20, 20});
    for (int r = 0; r < 8; ++r) {
        EXPECT_EQ(rc.cut_index[r], 4);
        EXPECT_DOUBLE_EQ(rc.cut_radius[r], tg.max_radius);
    }
}

TEST(ExtractContour, OneSamplePerRayGivesCircle)
{
    const GrayImage img(41, 41, std::uint8_t{0});
    const auto cfg = tiny(8, 4, 1);
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    const auto tg = build_template_graph(img, {20, 20}, st, {}, cfg);
    graph::CutResult cut;
    cut.side.assign(34, graph::Side::sink);
    cut.side[32] = graph::Side::source;
    for (int r = 0; r < 8; ++r) {
        cut.side[static_cast<std::size_t>(tg.node(r, 0))] = graph::Side::source;
    }
    const auto rc = extract_contour(cut, tg, {20, 20});
    for (int r = 0; r < 8; ++r) {
        EXPECT_DOUBLE_EQ(rc.cut_radius[r], tg.radius(0) + tg.step() / 2);
        const auto& v = rc.contour.vertices[static_cast<std::size_t>(r)];
        EXPECT_NEAR(std::hypot(v.x - 20, v.y - 20), tg.radius(0) + tg.step() / 2, 1e-12);
    }
}

TEST(ExtractContour, NonPrefixPartitionIsAnInvariantViolation)
{
    const GrayImage img(41, 41, std::uint8_t{0});
    const auto cfg = tiny(8, 4, 1);
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    const auto tg = build_template_graph(img, {20, 20}, st, {}, cfg);
    graph::CutResult cut;
    cut.side.assign(34, graph::Side::source);
    cut.side[33] = graph::Side::sink;
    cut.side[static_cast<std::size_t>(tg.node(3, 1))] = graph::Side::sink;
    EXPECT_THROW(extract_contour(cut, tg, {20, 20}), InvariantViolation);
}

TEST(HelperSeeds, LocateNearestRay)
{
    const auto p = locate_helper({15, 10}, {10, 10}, 8);
    EXPECT_EQ(p.ray, 0);
    EXPECT_DOUBLE_EQ(p.radius, 5.0);
    EXPECT_EQ(locate_helper({10, 15}, {10, 10}, 8).ray, 2);
    EXPECT_EQ(locate_helper({5, 10}, {10, 10}, 8).ray, 4);
    EXPECT_EQ(locate_helper({10, 9}, {10, 10}, 8).ray, 6);
    // Just below angle 2*pi wraps to ray 0.
    EXPECT_EQ(locate_helper({20, 9.99}, {10, 10}, 8).ray, 0);
    EXPECT_THROW(locate_helper({10, 10}, {10, 10}, 8), InvalidArgument);
}

TEST(HelperSeeds, ClampForcesCutInterval)
{
    std::mt19937 rng(25);
    std::uniform_real_distribution<double> rad(1.0, 19.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const GrayImage img = random_image(rng, 41, 41);
        TemplateConfig cfg;
        cfg.rays = 16;
        cfg.samples = 20;
        const SeedPoint seed{20, 20};
        const double a = ang(rng);
        const double rho = rad(rng);
        const HelperSeed h{seed.x + rho * std::cos(a), seed.y + rho * std::sin(a)};
        const auto st = estimate_intensity(img, seed, cfg);
        const std::vector<HelperSeed> helpers{h};
        const auto tg = build_template_graph(img, seed, st, helpers, cfg);
        const auto rc = extract_contour(graph::min_st_cut(tg.graph), tg, seed);
        const auto place = locate_helper(h, seed, cfg.rays);
        const int k = rc.cut_index[static_cast<std::size_t>(place.ray)];
        EXPECT_LE(tg.radius(k - 1), std::max(place.radius, tg.radius(0)));
        if (k < cfg.samples) {
            EXPECT_GT(tg.radius(k), place.radius);
        }
        EXPECT_LE(std::abs(rc.cut_radius[static_cast<std::size_t>(place.ray)] - place.radius), tg.step());
        for (int d = 1; d <= 2; ++d) {
            for (int nb : {(place.ray + d) % 16, (place.ray + 16 - d) % 16}) {
                EXPECT_LE(std::abs(rc.cut_index[static_cast<std::size_t>(nb)] - k), d * cfg.smoothness);
            }
        }
    }
}

TEST(HelperSeeds, ContradictoryHelpersAreInfeasible)
{
    const GrayImage img(41, 41, std::uint8_t{90});
    TemplateConfig cfg;
    cfg.rays = 16;
    cfg.samples = 20;
    const auto st = estimate_intensity(img, {20, 20}, cfg);
    // Same ray, two different radii.
    const std::vector<HelperSeed> helpers{{25, 20}, {38, 20}};
    const auto tg = build_template_graph(img, {20, 20}, st, helpers, cfg);
    EXPECT_THROW(graph::min_st_cut(tg.graph), InfeasibleCut);
}
