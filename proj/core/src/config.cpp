#include "uscut/config.hpp"

#include "uscut/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace uscut {
namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw InvalidArgument("invalid template config: " + what);
    }
}

std::string number(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

// FNV-1a, 64 bit; stable across platforms unlike std::hash.
std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

void TemplateConfig::validate() const
{
    require(rays >= 8, "rays must be >= 8");
    require(samples >= 4, "samples_per_ray must be >= 4");
    require(smoothness >= 0 && smoothness < samples, "smoothness must satisfy 0 <= delta < samples_per_ray");
    require(std::isfinite(seed_disk_radius) && seed_disk_radius >= 1.0, "seed_disk_radius must be >= 1");
    require(std::isfinite(tolerance_factor) && tolerance_factor > 0.0, "tolerance_factor must be > 0");
    require(std::isfinite(outside_floor) && outside_floor > 0.0, "outside_floor must be > 0");
    if (max_radius_cap) {
        require(std::isfinite(*max_radius_cap) && *max_radius_cap >= 1.0, "max_radius cap must be >= 1");
    }
}

std::string TemplateConfig::fingerprint() const
{
    std::string canonical = "v" + std::to_string(kConfigSchemaVersion) + ";rays=" + std::to_string(rays) +
                            ";samples=" + std::to_string(samples) + ";delta=" + std::to_string(smoothness) +
                            ";rho0=" + number(seed_disk_radius) + ";k=" + number(tolerance_factor) +
                            ";eps=" + number(outside_floor) +
                            ";cap=" + (max_radius_cap ? number(*max_radius_cap) : std::string("none"));
    std::array<char, 17> hex{};
    const auto res = std::to_chars(hex.data(), hex.data() + hex.size(), fnv1a(canonical), 16);
    std::string digits(hex.data(), res.ptr);
    return "uscut-v" + std::to_string(kConfigSchemaVersion) + "-" + std::string(16 - digits.size(), '0') + digits;
}

bool TemplateConfig::is_default() const
{
    return *this == TemplateConfig{};
}

void to_json(nlohmann::json& j, const TemplateConfig& cfg)
{
    j = nlohmann::json{
        {"version", kConfigSchemaVersion},
        {"rays", cfg.rays},
        {"samples_per_ray", cfg.samples},
        {"smoothness", cfg.smoothness},
        {"seed_disk_radius", cfg.seed_disk_radius},
        {"tolerance_factor", cfg.tolerance_factor},
        {"outside_floor", cfg.outside_floor},
        {"max_radius_cap", cfg.max_radius_cap ? nlohmann::json(*cfg.max_radius_cap) : nlohmann::json(nullptr)},
    };
}

void from_json(const nlohmann::json& j, TemplateConfig& cfg)
{
    const int version = j.value("version", kConfigSchemaVersion);
    if (version != kConfigSchemaVersion) {
        throw InvalidArgument("unsupported config version " + std::to_string(version));
    }
    TemplateConfig out;
    out.rays = j.value("rays", out.rays);
    out.samples = j.value("samples_per_ray", out.samples);
    out.smoothness = j.value("smoothness", out.smoothness);
    out.seed_disk_radius = j.value("seed_disk_radius", out.seed_disk_radius);
    out.tolerance_factor = j.value("tolerance_factor", out.tolerance_factor);
    out.outside_floor = j.value("outside_floor", out.outside_floor);
    if (auto it = j.find("max_radius_cap"); it != j.end() && !it->is_null()) {
        out.max_radius_cap = it->get<double>();
    }
    out.validate();
    cfg = out;
}

TemplateConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    try {
        return nlohmann::json::parse(in).get<TemplateConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed config '" + path.string() + "': " + e.what());
    }
}

} // namespace uscut
