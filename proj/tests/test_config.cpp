#include "uscut/config.hpp"
#include "uscut/error.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

using namespace uscut;

TEST(Config, ShippedFileEqualsBuiltInDefaults)
{
    const TemplateConfig cfg = load_config(USCUT_DEFAULT_CONFIG);
    EXPECT_EQ(cfg, TemplateConfig{});
    EXPECT_TRUE(cfg.is_default());
    EXPECT_EQ(cfg.fingerprint(), TemplateConfig{}.fingerprint());
}

TEST(Config, DefaultsAreTheFrozenSet)
{
    const TemplateConfig cfg;
    EXPECT_EQ(cfg.rays, 60);
    EXPECT_EQ(cfg.samples, 40);
    EXPECT_EQ(cfg.smoothness, 2);
    EXPECT_EQ(cfg.seed_disk_radius, 3.0);
    EXPECT_EQ(cfg.tolerance_factor, 5.0);
    EXPECT_EQ(cfg.outside_floor, 5.0);
    EXPECT_FALSE(cfg.max_radius_cap.has_value());
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, FingerprintTracksEveryField)
{
    const std::string base = TemplateConfig{}.fingerprint();
    EXPECT_EQ(base.rfind("uscut-v1-", 0), 0u);
    EXPECT_EQ(base.size(), 9u + 16u);
    auto changed = [&](auto mutate) {
        TemplateConfig c;
        mutate(c);
        return c.fingerprint() != base;
    };
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.rays = 61; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.samples = 41; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.smoothness = 3; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.seed_disk_radius = 3.5; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.tolerance_factor = 1.5; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.outside_floor = 6; }));
    EXPECT_TRUE(changed([](TemplateConfig& c) { c.max_radius_cap = 50; }));
}

TEST(Config, ValidationRejectsBrokenInvariants)
{
    auto bad = [](auto mutate) {
        TemplateConfig c;
        mutate(c);
        return c;
    };
    EXPECT_THROW(bad([](TemplateConfig& c) { c.rays = 7; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.samples = 3; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.smoothness = 40; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.smoothness = -1; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.seed_disk_radius = 0.5; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.tolerance_factor = 0; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.outside_floor = 0; }).validate(), InvalidArgument);
    EXPECT_THROW(bad([](TemplateConfig& c) { c.max_radius_cap = 0.5; }).validate(), InvalidArgument);
}

TEST(Config, JsonRoundTrip)
{
    TemplateConfig c;
    c.rays = 24;
    c.max_radius_cap = 80.0;
    const nlohmann::json j = c;
    EXPECT_EQ(j.at("version"), 1);
    EXPECT_EQ(j.get<TemplateConfig>(), c);
}
