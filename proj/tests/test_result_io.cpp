#include "test_support.hpp"

#include "uscut/error.hpp"
#include "uscut/image_io.hpp"
#include "uscut/result_io.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

using namespace uscut;
using testing_support::TempDir;

TEST(SeedFile, ParseFormatRoundTrip)
{
    const SeedFile s = parse_seed_file("# comment\nseed 10.5 20\n\nhelper 1 2\nhelper 3.25 4\n");
    EXPECT_EQ(s.seed, (SeedPoint{10.5, 20}));
    ASSERT_EQ(s.helpers.size(), 2u);
    EXPECT_EQ(s.helpers[1], (HelperSeed{3.25, 4}));
    EXPECT_EQ(format_seed_file(s), "seed 10.5 20\nhelper 1 2\nhelper 3.25 4\n");
    const SeedFile back = parse_seed_file(format_seed_file(s));
    EXPECT_EQ(back.seed, s.seed);
    EXPECT_EQ(back.helpers, s.helpers);
}

TEST(SeedFile, RejectsMalformedInput)
{
    EXPECT_THROW(parse_seed_file(""), InvalidArgument);
    EXPECT_THROW(parse_seed_file("helper 1 2\n"), InvalidArgument);
    EXPECT_THROW(parse_seed_file("seed 1\n"), InvalidArgument);
    EXPECT_THROW(parse_seed_file("seed 1 2 3\n"), InvalidArgument);
    EXPECT_THROW(parse_seed_file("seed a b\n"), InvalidArgument);
    EXPECT_THROW(parse_seed_file("seed 1 2\nseed 3 4\n"), InvalidArgument);
    EXPECT_THROW(parse_seed_file("point 1 2\n"), InvalidArgument);
}

TEST(ResultIo, WritesAllFilesDeterministically)
{
    TempDir dir("res");
    const auto p = make_phantom(testing_support::accuracy_phantom(3));
    const SeedFile seeds{{100, 100}, {}};
    const auto r1 = segment(p.image, seeds.seed, seeds.helpers);
    const auto r2 = segment(p.image, seeds.seed, seeds.helpers);
    write_result(dir / "a", r1, p.image, seeds, TemplateConfig{});
    write_result(dir / "b", r2, p.image, seeds, TemplateConfig{});
    for (const char* f : {kMaskFile, kContourFile, kResultFile}) {
        EXPECT_EQ(testing_support::slurp(dir.path() / "a" / f), testing_support::slurp(dir.path() / "b" / f)) << f;
    }
    EXPECT_EQ(load_mask(dir.path() / "a" / kMaskFile), r1.mask);

    const auto j = nlohmann::json::parse(testing_support::slurp(dir.path() / "a" / kResultFile));
    EXPECT_EQ(j.at("config_fingerprint"), TemplateConfig{}.fingerprint());
    EXPECT_EQ(j.at("cut_radius_px").size(), 60u);
    EXPECT_EQ(j.at("diameter_a_mm").get<double>(), r1.diameter_a);
    EXPECT_FALSE(j.contains("elapsed_ms"));
    const auto t = nlohmann::json::parse(testing_support::slurp(dir.path() / "a" / kTimingFile));
    EXPECT_EQ(t.at("elapsed_ms").get<double>(), r1.elapsed_ms);
}

TEST(ResultIo, ContourTextRoundTripsExactly)
{
    ContourPolygon c{{{0.1, 0.2}, {1.0 / 3.0, 2e-17}, {123456.789, -4.0}}};
    const std::string text = format_contour(c);
    std::istringstream in(text);
    std::vector<Point2> back;
    double x = 0;
    double y = 0;
    while (in >> x >> y) {
        back.push_back({x, y});
    }
    EXPECT_EQ(back, c.vertices);
}
