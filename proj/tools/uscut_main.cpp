// uscut: single-image segmentation, phantom generation, batch evaluation and
// the interactive session server.
//
// Exit codes: 0 ok, 1 usage or invalid input, 2 processing error.

#include "uscut/config.hpp"
#include "uscut/error.hpp"
#include "uscut/eval.hpp"
#include "uscut/image_io.hpp"
#include "uscut/phantom.hpp"
#include "uscut/result_io.hpp"
#include "uscut/segment.hpp"
#include "uscut/session.hpp"
#include "uscut/session_transport.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

// Thrown for problems the user can fix on the command line.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& flag)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto end = comma == std::string::npos ? text.size() : comma;
        double v = 0.0;
        const auto res = std::from_chars(text.data() + pos, text.data() + end, v);
        if (res.ec != std::errc{} || res.ptr != text.data() + end) {
            throw UsageError(flag + " expects " + std::to_string(count) + " comma-separated numbers, got '" +
                             text + "'");
        }
        out.push_back(v);
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (out.size() != count) {
        throw UsageError(flag + " expects " + std::to_string(count) + " comma-separated numbers, got '" + text +
                         "'");
    }
    return out;
}

struct ConfigFlags {
    std::string config_path;
    std::optional<int> rays;
    std::optional<int> samples;
    std::optional<int> smoothness;
    std::optional<double> seed_radius;
    std::optional<double> tolerance_factor;
    std::optional<double> outside_floor;
    std::optional<double> max_radius;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", config_path, "Template config JSON (default: built-in frozen config)");
        auto* g = cmd->add_option_group("template overrides", "Deviate from the frozen defaults (not for evaluation runs)");
        g->add_option("--rays", rays, "Number of rays");
        g->add_option("--samples", samples, "Samples per ray");
        g->add_option("--smoothness", smoothness, "Max cut-index change between adjacent rays");
        g->add_option("--seed-radius", seed_radius, "Radius of the seed disk used for the gray-value model");
        g->add_option("--tolerance-factor", tolerance_factor, "Tolerance = factor * deviation");
        g->add_option("--outside-floor", outside_floor, "Lower bound of the tolerance");
        g->add_option("--max-radius", max_radius, "Cap on the template radius, px");
    }

    uscut::TemplateConfig resolve() const
    {
        uscut::TemplateConfig cfg;
        if (!config_path.empty()) {
            cfg = uscut::load_config(config_path);
        }
        if (rays) cfg.rays = *rays;
        if (samples) cfg.samples = *samples;
        if (smoothness) cfg.smoothness = *smoothness;
        if (seed_radius) cfg.seed_disk_radius = *seed_radius;
        if (tolerance_factor) cfg.tolerance_factor = *tolerance_factor;
        if (outside_floor) cfg.outside_floor = *outside_floor;
        if (max_radius) cfg.max_radius_cap = *max_radius;
        try {
            cfg.validate();
        } catch (const uscut::InvalidArgument& e) {
            throw UsageError(e.what());
        }
        if (!cfg.is_default()) {
            std::cerr << "WARNING: ******************************************************\n"
                      << "WARNING: template parameters differ from the frozen defaults\n"
                      << "WARNING: (" << cfg.fingerprint() << " instead of " << uscut::TemplateConfig{}.fingerprint()
                      << ").\n"
                      << "WARNING: results are not comparable with default-config runs.\n"
                      << "WARNING: ******************************************************\n";
        }
        return cfg;
    }
};

struct SegmentArgs {
    std::string image;
    std::string seed;
    std::vector<std::string> helpers;
    std::string seeds_file;
    std::string out;
    std::optional<double> spacing;
    ConfigFlags config;
};

int cmd_segment(const SegmentArgs& a)
{
    const uscut::TemplateConfig cfg = a.config.resolve();
    uscut::SeedFile seeds;
    if (!a.seeds_file.empty()) {
        seeds = uscut::read_seed_file(a.seeds_file);
    }
    if (!a.seed.empty()) {
        const auto xy = parse_list(a.seed, 2, "--seed");
        seeds.seed = {xy[0], xy[1]};
    } else if (a.seeds_file.empty()) {
        throw UsageError("--seed or --seeds is required");
    }
    for (const auto& h : a.helpers) {
        const auto xy = parse_list(h, 2, "--helper");
        seeds.helpers.push_back({xy[0], xy[1]});
    }
    if (a.spacing && !(*a.spacing > 0.0)) {
        throw UsageError("--spacing must be positive");
    }

    const uscut::GrayImage image = uscut::load_image(a.image, a.spacing);
    if (!image.contains(seeds.seed.x, seeds.seed.y)) {
        throw UsageError("seed outside image");
    }
    for (const auto& h : seeds.helpers) {
        if (!image.contains(h.x, h.y)) {
            throw UsageError("helper seed outside image");
        }
    }
    const uscut::SegmentationResult result = uscut::segment(image, seeds.seed, seeds.helpers, cfg);
    uscut::write_result(a.out, result, image, seeds, cfg);

    std::printf("diameter_a_mm %.3f\ndiameter_b_mm %.3f\nelapsed_ms %.3f\n", result.diameter_a, result.diameter_b,
                result.elapsed_ms);
    return kOk;
}

struct PhantomArgs {
    std::string out;
    std::string size = "200x200";
    std::string disk;
    int fg = 60;
    int bg = 160;
    int noise = 10;
    std::uint64_t rng_seed = 1;
    double spacing = 1.0;
    std::string sector;
    std::string case_id = "phantom";
};

int cmd_phantom(const PhantomArgs& a)
{
    uscut::PhantomSpec spec;
    int w = 0;
    int h = 0;
    if (std::sscanf(a.size.c_str(), "%dx%d", &w, &h) != 2) {
        throw UsageError("--size expects WxH, got '" + a.size + "'");
    }
    spec.width = w;
    spec.height = h;
    spec.cx = w / 2.0;
    spec.cy = h / 2.0;
    if (!a.disk.empty()) {
        const auto d = parse_list(a.disk, 3, "--disk");
        spec.cx = d[0];
        spec.cy = d[1];
        spec.radius = d[2];
    }
    spec.fg = a.fg;
    spec.bg = a.bg;
    spec.noise = a.noise;
    spec.rng_seed = a.rng_seed;
    spec.spacing_mm = a.spacing;
    if (!a.sector.empty()) {
        const auto s = parse_list(a.sector, 3, "--sector");
        spec.sector = uscut::PhantomSector{s[0], s[1], s[2]};
    }
    try {
        spec.validate();
    } catch (const uscut::InvalidArgument& e) {
        throw UsageError(e.what());
    }

    const uscut::Phantom p = uscut::make_phantom(spec);
    const std::filesystem::path dir = a.out;
    std::filesystem::create_directories(dir);
    uscut::save_image(dir / "image.png", p.image);
    uscut::write_spacing_sidecar(dir / "image.png", spec.spacing_mm);
    uscut::save_mask(dir / "truth.png", p.truth);
    uscut::write_seed_file(dir / "seeds.txt", {{spec.cx, spec.cy}, {}});
    const nlohmann::json record = {
        {"case_id", a.case_id},
        {"image", "image.png"},
        {"manual_mask", "truth.png"},
        {"seeds", "seeds.txt"},
    };
    uscut::write_text_file(dir / "case.json", record.dump(2) + "\n");
    std::printf("lesion_pixels %zu\n", p.truth.count());
    return kOk;
}

struct EvalArgs {
    std::string manifest;
    std::string out;
    bool satisfied_only = false;
    std::string format = "txt";
    unsigned threads = 0;
    ConfigFlags config;
};

int cmd_eval(const EvalArgs& a)
{
    const uscut::TemplateConfig cfg = a.config.resolve();
    uscut::eval::RunManifest manifest;
    try {
        manifest = uscut::eval::load_manifest(a.manifest);
    } catch (const uscut::Error& e) {
        throw UsageError(e.what());
    }
    if (manifest.cases.empty()) {
        throw UsageError("no cases in manifest");
    }
    if (manifest.config_fingerprint && *manifest.config_fingerprint != cfg.fingerprint()) {
        throw UsageError("manifest expects config " + *manifest.config_fingerprint + " but the active config is " +
                         cfg.fingerprint());
    }
    const std::filesystem::path out = a.out.empty() ? manifest.output_dir : std::filesystem::path(a.out);
    const auto format = a.format == "csv" ? uscut::eval::Format::csv : uscut::eval::Format::txt;

    const auto reports = uscut::eval::evaluate_manifest(manifest, cfg, a.threads);
    std::size_t failed = 0;
    for (const auto& r : reports) {
        if (!r.ok()) {
            ++failed;
            std::cerr << "case " << r.case_id << " failed: " << r.error << "\n";
        }
    }
    const auto ok = uscut::eval::successful(reports);
    uscut::metrics::EvalSummary summary;
    try {
        summary = uscut::eval::summarize(ok, a.satisfied_only);
    } catch (const uscut::InvalidArgument& e) {
        std::filesystem::create_directories(out);
        uscut::write_text_file(out / "cases.csv", uscut::eval::format_case_csv(reports));
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    uscut::eval::emit_report(out, summary, reports, format, cfg);
    std::cout << (format == uscut::eval::Format::csv ? uscut::eval::format_summary_csv(summary)
                                                     : uscut::eval::format_summary_table(summary));
    if (failed > 0) {
        std::cout << failed << " of " << reports.size() << " cases failed (see cases.csv)\n";
    }
    return kOk;
}

struct ServeArgs {
    bool stdio = false;
    std::string host = "127.0.0.1";
    std::uint16_t port = 8765;
    ConfigFlags config;
};

int cmd_serve(const ServeArgs& a)
{
    const uscut::TemplateConfig cfg = a.config.resolve();
    if (a.stdio) {
        uscut::SessionService service(cfg);
        service.serve_stdio(std::cin, std::cout);
        return kOk;
    }
    uscut::WebSocketServer server(a.host, a.port, cfg);
    std::cout << "listening on ws://" << a.host << ":" << server.port() << std::endl;
    server.run();
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interactive graph-cut lesion segmentation"};
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* segment = app.add_subcommand("segment", "Segment one image from a seed point");
    segment->add_option("--image", seg.image, "Input image (PNG or PGM)")->required();
    segment->add_option("--seed", seg.seed, "Seed point x,y");
    segment->add_option("--helper", seg.helpers, "Helper seed x,y on the lesion border (repeatable)");
    segment->add_option("--seeds", seg.seeds_file, "Seed file with 'seed x y' / 'helper x y' lines");
    segment->add_option("--out", seg.out, "Output directory")->required();
    segment->add_option("--spacing", seg.spacing, "Pixel spacing in mm (overrides the image sidecar)");
    seg.config.attach(segment);

    PhantomArgs ph;
    auto* phantom = app.add_subcommand("phantom", "Generate a synthetic disk phantom with ground truth");
    phantom->add_option("--out", ph.out, "Output directory")->required();
    phantom->add_option("--size", ph.size, "Image size WxH")->capture_default_str();
    phantom->add_option("--disk", ph.disk, "Disk cx,cy,r (default: centered, r=30)");
    phantom->add_option("--fg", ph.fg, "Lesion gray value")->capture_default_str();
    phantom->add_option("--bg", ph.bg, "Background gray value")->capture_default_str();
    phantom->add_option("--noise", ph.noise, "Uniform noise amplitude")->capture_default_str();
    phantom->add_option("--rng-seed", ph.rng_seed, "Noise generator seed")->capture_default_str();
    phantom->add_option("--spacing", ph.spacing, "Pixel spacing in mm")->capture_default_str();
    phantom->add_option("--sector", ph.sector, "Low-contrast wedge start_deg,width_deg,contrast");
    phantom->add_option("--case-id", ph.case_id, "case_id for the emitted case.json")->capture_default_str();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Evaluate a manifest of cases against manual masks");
    eval->add_option("--manifest", ev.manifest, "Manifest JSON")->required();
    eval->add_option("--out", ev.out, "Output directory (default: manifest output_dir)");
    eval->add_flag("--satisfied-only", ev.satisfied_only, "Summarize satisfied cases only");
    eval->add_option("--format", ev.format, "Summary format")
        ->check(CLI::IsMember({"csv", "txt"}))
        ->capture_default_str();
    eval->add_option("--threads", ev.threads, "Worker threads (0 = all cores)")->capture_default_str();
    ev.config.attach(eval);

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "Run the interactive session server");
    serve->add_flag("--stdio", sv.stdio, "One JSON message per line on stdin/stdout");
    serve->add_option("--host", sv.host, "Bind address")->capture_default_str();
    serve->add_option("--port", sv.port, "WebSocket port (0 = any free port)")->capture_default_str();
    sv.config.attach(serve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*segment) {
            return cmd_segment(seg);
        }
        if (*phantom) {
            return cmd_phantom(ph);
        }
        if (*eval) {
            return cmd_eval(ev);
        }
        return cmd_serve(sv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
