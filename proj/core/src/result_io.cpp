#include "uscut/result_io.hpp"

#include "uscut/error.hpp"
#include "uscut/image_io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uscut {
namespace {

double parse_coordinate(const std::string& token, int line_no)
{
    double v = 0.0;
    const auto* first = token.data();
    const auto* last = first + token.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
        throw InvalidArgument("seed file line " + std::to_string(line_no) + ": bad number '" + token + "'");
    }
    return v;
}

nlohmann::json point_json(double x, double y)
{
    return nlohmann::json::array({x, y});
}

} // namespace

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

SeedFile parse_seed_file(const std::string& text)
{
    SeedFile out;
    bool have_seed = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream words(line);
        std::string kind;
        if (!(words >> kind) || kind.front() == '#') {
            continue;
        }
        std::string xs, ys, extra;
        if (!(words >> xs >> ys) || (words >> extra)) {
            throw InvalidArgument("seed file line " + std::to_string(line_no) + ": expected '<kind> <x> <y>'");
        }
        const double x = parse_coordinate(xs, line_no);
        const double y = parse_coordinate(ys, line_no);
        if (kind == "seed") {
            if (have_seed) {
                throw InvalidArgument("seed file has more than one seed line");
            }
            out.seed = {x, y};
            have_seed = true;
        } else if (kind == "helper") {
            out.helpers.push_back({x, y});
        } else {
            throw InvalidArgument("seed file line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
        }
    }
    if (!have_seed) {
        throw InvalidArgument("seed file has no seed line");
    }
    return out;
}

SeedFile read_seed_file(const std::filesystem::path& path)
{
    return parse_seed_file(read_text_file(path));
}

std::string format_seed_file(const SeedFile& seeds)
{
    std::string out = "seed " + format_number(seeds.seed.x) + " " + format_number(seeds.seed.y) + "\n";
    for (const auto& h : seeds.helpers) {
        out += "helper " + format_number(h.x) + " " + format_number(h.y) + "\n";
    }
    return out;
}

void write_seed_file(const std::filesystem::path& path, const SeedFile& seeds)
{
    write_text_file(path, format_seed_file(seeds));
}

std::string format_contour(const ContourPolygon& contour)
{
    std::string out;
    for (const auto& p : contour.vertices) {
        out += format_number(p.x);
        out += ' ';
        out += format_number(p.y);
        out += '\n';
    }
    return out;
}

std::string format_result_record(const SegmentationResult& result, const GrayImage& image, const SeedFile& seeds,
                                 const TemplateConfig& cfg)
{
    nlohmann::json helpers = nlohmann::json::array();
    for (const auto& h : seeds.helpers) {
        helpers.push_back(point_json(h.x, h.y));
    }
    nlohmann::json j = {
        {"version", 1},
        {"config_fingerprint", cfg.fingerprint()},
        {"image", {{"width", image.width()}, {"height", image.height()}, {"spacing_mm_per_px", image.spacing()}}},
        {"seed", point_json(seeds.seed.x, seeds.seed.y)},
        {"helpers", helpers},
        {"intensity",
         {{"mean", result.stats.mean}, {"deviation", result.stats.deviation}, {"tolerance", result.stats.tolerance}}},
        {"max_radius_px", result.max_radius},
        {"cut_cost", result.cut_cost},
        {"cut_index", result.cut_index},
        {"cut_radius_px", result.cut_radius},
        {"diameter_a_mm", result.diameter_a},
        {"diameter_b_mm", result.diameter_b},
        {"axis_a", point_json(result.axis_a.x, result.axis_a.y)},
        {"area_mm2", mask_area(result.mask, image.spacing())},
    };
    return j.dump(2) + "\n";
}

void write_result(const std::filesystem::path& dir, const SegmentationResult& result, const GrayImage& image,
                  const SeedFile& seeds, const TemplateConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    save_mask(dir / kMaskFile, result.mask);
    write_text_file(dir / kContourFile, format_contour(result.contour));
    write_text_file(dir / kResultFile, format_result_record(result, image, seeds, cfg));
    const nlohmann::json timing = {{"elapsed_ms", result.elapsed_ms}};
    write_text_file(dir / kTimingFile, timing.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace uscut
