#include "uscut/phantom.hpp"

#include "uscut/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace uscut {

void PhantomSpec::validate() const
{
    if (width < 1 || height < 1) {
        throw InvalidArgument("phantom size must be positive");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("disk radius must be positive");
    }
    if (cx - radius < 0.0 || cy - radius < 0.0 || cx + radius > width - 1 || cy + radius > height - 1) {
        throw InvalidArgument("disk does not fit inside the image");
    }
    if (fg < 0 || fg > 255 || bg < 0 || bg > 255) {
        throw InvalidArgument("intensities must lie in [0, 255]");
    }
    if (noise < 0 || noise > 255) {
        throw InvalidArgument("noise amplitude must lie in [0, 255]");
    }
    if (!(spacing_mm > 0.0)) {
        throw InvalidArgument("spacing must be positive");
    }
    if (sector && (!(sector->width_deg > 0.0) || sector->width_deg > 360.0 || sector->contrast < 0.0 ||
                   sector->contrast > 1.0)) {
        throw InvalidArgument("sector needs width in (0, 360] and contrast in [0, 1]");
    }
}

Phantom make_phantom(const PhantomSpec& spec)
{
    spec.validate();
    GrayImage image(spec.width, spec.height, static_cast<std::uint8_t>(spec.bg), spec.spacing_mm);
    BinaryMask truth(spec.width, spec.height);
    std::mt19937_64 rng(spec.rng_seed);
    const auto span = static_cast<std::uint64_t>(2 * spec.noise + 1);
    const double r2 = spec.radius * spec.radius;
    const double sector_value =
        spec.sector ? std::round(spec.fg + spec.sector->contrast * (spec.bg - spec.fg)) : 0.0;

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double dx = x - spec.cx;
            const double dy = y - spec.cy;
            double value = spec.bg;
            if (dx * dx + dy * dy <= r2) {
                value = spec.fg;
                truth.set(x, y, true);
            } else if (spec.sector) {
                double deg = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
                double rel = std::fmod(deg - spec.sector->start_deg, 360.0);
                if (rel < 0.0) {
                    rel += 360.0;
                }
                if (rel <= spec.sector->width_deg) {
                    value = sector_value;
                }
            }
            if (spec.noise > 0) {
                value += static_cast<double>(rng() % span) - spec.noise;
            }
            image.set(x, y, static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0)));
        }
    }
    return {std::move(image), std::move(truth)};
}

PhantomSpec inverted(PhantomSpec spec)
{
    std::swap(spec.fg, spec.bg);
    return spec;
}

} // namespace uscut
