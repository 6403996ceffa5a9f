#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace uscut {

/// Geometry and intensity-model parameters of the circular template.
///
/// The defaults are the single parameterization used for every image; they
/// are mirrored in config/uscut_default.json and identified by fingerprint().
struct TemplateConfig {
    int rays = 60;
    int samples = 40;
    /// Max change of the cut index between adjacent rays, in samples.
    int smoothness = 2;
    double seed_disk_radius = 3.0;
    double tolerance_factor = 5.0;
    double outside_floor = 5.0;
    /// Upper bound on the template radius; the radius is otherwise the
    /// distance from the seed to the nearest image border.
    std::optional<double> max_radius_cap;

    /// Throws InvalidArgument when an invariant is violated (rays >= 8,
    /// samples >= 4, 0 <= smoothness < samples, disk radius >= 1, ...).
    void validate() const;

    /// Stable identifier of the parameter set, e.g. "uscut-v1-3f09a1c2d4e5b6a7".
    std::string fingerprint() const;

    bool is_default() const;

    friend bool operator==(const TemplateConfig&, const TemplateConfig&) = default;
};

inline constexpr int kConfigSchemaVersion = 1;

void to_json(nlohmann::json& j, const TemplateConfig& cfg);
void from_json(const nlohmann::json& j, TemplateConfig& cfg);

/// Reads a config document (see config/uscut_default.json). Throws IoError.
TemplateConfig load_config(const std::filesystem::path& path);

} // namespace uscut
