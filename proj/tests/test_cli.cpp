#include "test_support.hpp"

#include "uscut/image_io.hpp"
#include "uscut/phantom.hpp"

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include <cmath>

using testing_support::cli;
using testing_support::quote;
using testing_support::run;
using testing_support::TempDir;

namespace {

void make_phantom_dir(const std::filesystem::path& dir, const std::string& extra = "")
{
    const auto r = run(cli() + " phantom --out " + quote(dir) + " " + extra);
    ASSERT_EQ(r.exit_code, 0) << r.output;
}

std::string manifest_for(const std::vector<std::string>& ids, const std::string& out = "out")
{
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& id : ids) {
        cases.push_back({{"case_id", id},
                         {"image", id + "/image.png"},
                         {"manual_mask", id + "/truth.png"},
                         {"seeds", id + "/seeds.txt"},
                         {"satisfied", true}});
    }
    return nlohmann::json{{"version", 1}, {"output_dir", out}, {"cases", cases}}.dump(2);
}

} // namespace

TEST(Cli, SegmentWritesOutputsAndIsDeterministic)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "p");
    const std::string base = cli() + " segment --image " + quote(dir / "p/image.png") + " --seed 100,120 --out ";
    auto r = run(base + quote(dir / "r1"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("diameter_a_mm"), std::string::npos);
    EXPECT_NE(r.output.find("elapsed_ms"), std::string::npos);
    for (const char* f : {"mask.png", "contour.txt", "result.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir.path() / "r1" / f)) << f;
    }
    r = run(base + quote(dir / "r2"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    for (const char* f : {"mask.png", "contour.txt", "result.json"}) {
        EXPECT_EQ(testing_support::slurp(dir.path() / "r1" / f), testing_support::slurp(dir.path() / "r2" / f)) << f;
    }
}

TEST(Cli, SegmentUsageErrors)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "p");
    const std::string img = quote(dir / "p/image.png");
    auto r = run(cli() + " segment --image " + img + " --seed 9999,9999 --out " + quote(dir / "x"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("seed outside image"), std::string::npos) << r.output;
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "x"));
    EXPECT_EQ(run(cli() + " segment --image " + img + " --seed 1 --out " + quote(dir / "x")).exit_code, 1);
    EXPECT_EQ(run(cli() + " segment --seed 1,1 --out " + quote(dir / "x")).exit_code, 1);
    EXPECT_EQ(run(cli() + " segment --image " + img + " --seed 100,100 --rays 4 --out " + quote(dir / "x")).exit_code,
              1);
    EXPECT_EQ(run(cli() + " nonsense").exit_code, 1);
    EXPECT_EQ(run(cli()).exit_code, 1);
    r = run(cli() + " segment --image " + quote(dir / "missing.png") + " --seed 1,1 --out " + quote(dir / "x"));
    EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(Cli, SegmentWithHelpersAndSeedFile)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "p");
    testing_support::spit(dir / "seeds.txt", "seed 100 100\nhelper 130 100\n");
    const std::string img = quote(dir / "p/image.png");
    auto a = run(cli() + " segment --image " + img + " --seeds " + quote(dir / "seeds.txt") + " --out " + quote(dir / "a"));
    auto b = run(cli() + " segment --image " + img + " --seed 100,100 --helper 130,100 --out " + quote(dir / "b"));
    ASSERT_EQ(a.exit_code, 0) << a.output;
    ASSERT_EQ(b.exit_code, 0) << b.output;
    EXPECT_EQ(testing_support::slurp(dir.path() / "a/result.json"), testing_support::slurp(dir.path() / "b/result.json"));
}

TEST(Cli, TemplateOverridesWarnLoudly)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "p");
    const auto r = run(cli() + " segment --image " + quote(dir / "p/image.png") + " --seed 100,100 --rays 30 --out " +
                       quote(dir / "o"));
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("WARNING"), std::string::npos);
    const auto quiet = run(cli() + " segment --image " + quote(dir / "p/image.png") + " --seed 100,100 --out " +
                           quote(dir / "o2"));
    EXPECT_EQ(quiet.output.find("WARNING"), std::string::npos);
}

TEST(Cli, HelpExitsZeroWithoutSideEffects)
{
    TempDir dir("cli");
    for (const char* sub : {"", " segment", " phantom", " eval", " serve"}) {
        const auto r = run("cd " + quote(dir.path()) + " && " + cli() + sub + " --help");
        EXPECT_EQ(r.exit_code, 0) << sub << r.output;
        EXPECT_NE(r.output.find("--"), std::string::npos);
    }
    EXPECT_TRUE(std::filesystem::is_empty(dir.path()));
}

TEST(Cli, PhantomDiskCountAndReproducibility)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "a", "--disk 100,100,30 --noise 0");
    const auto mask = uscut::load_mask(dir / "a/truth.png");
    std::size_t expected = 0;
    for (int y = 0; y < 200; ++y) {
        for (int x = 0; x < 200; ++x) {
            expected += (x - 100) * (x - 100) + (y - 100) * (y - 100) <= 900 ? 1 : 0;
        }
    }
    EXPECT_EQ(mask.count(), expected);
    make_phantom_dir(dir / "b", "--rng-seed 9");
    make_phantom_dir(dir / "c", "--rng-seed 9");
    make_phantom_dir(dir / "d", "--rng-seed 10");
    EXPECT_EQ(testing_support::slurp(dir / "b/image.png"), testing_support::slurp(dir / "c/image.png"));
    EXPECT_NE(testing_support::slurp(dir / "b/image.png"), testing_support::slurp(dir / "d/image.png"));
    const auto r = run(cli() + " phantom --out " + quote(dir / "e") + " --disk 100,100,300");
    EXPECT_EQ(r.exit_code, 1) << r.output;
}

TEST(Cli, EvalThreeCasesAndBrokenPath)
{
    TempDir dir("cli");
    for (int i = 1; i <= 3; ++i) {
        make_phantom_dir(dir / ("c" + std::to_string(i)), "--rng-seed " + std::to_string(i));
    }
    testing_support::spit(dir / "m.json", manifest_for({"c1", "c2", "c3"}));
    auto r = run(cli() + " eval --manifest " + quote(dir / "m.json") + " --format csv");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("dsc,3,"), std::string::npos) << r.output;
    EXPECT_TRUE(std::filesystem::exists(dir / "out/cases.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out/summary.csv"));

    std::filesystem::remove(dir / "c2/truth.png");
    r = run(cli() + " eval --manifest " + quote(dir / "m.json") + " --out " + quote(dir / "out2"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto csv = testing_support::slurp(dir / "out2/cases.csv");
    EXPECT_NE(csv.find("c2,,,,,,,,"), std::string::npos) << csv;
    EXPECT_TRUE(std::filesystem::exists(dir / "out2/summary.txt"));
}

TEST(Cli, EvalManifestLevelFailures)
{
    TempDir dir("cli");
    testing_support::spit(dir / "empty.json", R"({"version": 1, "cases": []})");
    auto r = run(cli() + " eval --manifest " + quote(dir / "empty.json"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("no cases"), std::string::npos) << r.output;
    r = run(cli() + " eval --manifest " + quote(dir / "missing.json"));
    EXPECT_EQ(r.exit_code, 1) << r.output;
    r = run(cli() + " eval --manifest " + quote(dir / "empty.json") + " --format xml");
    EXPECT_EQ(r.exit_code, 1) << r.output;
}

TEST(Cli, ServeStdioAnswersSeedMove)
{
    TempDir dir("cli");
    make_phantom_dir(dir / "p");
    const std::string script = nlohmann::json{{"v", 1}, {"kind", "load"}, {"seq", 1}, {"image", (dir / "p/image.png").string()}}.dump() +
                               "\n" + R"({"v":1,"kind":"seed_move","seq":2,"x":100,"y":100})" + "\n";
    testing_support::spit(dir / "in.jsonl", script);
    const auto r = run(cli() + " serve --stdio < " + quote(dir / "in.jsonl"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("\"kind\":\"result\""), std::string::npos) << r.output;
}
