#pragma once

#include "uscut/imaging.hpp"

#include <cstdint>
#include <optional>

namespace uscut {

/// Wedge outside the disk, seen from the disk center, filled with
/// fg + contrast * (bg - fg). A low contrast makes the background in the
/// wedge look like lesion.
struct PhantomSector {
    double start_deg = 0.0;
    double width_deg = 40.0;
    double contrast = 0.3;
};

struct PhantomSpec {
    int width = 200;
    int height = 200;
    double cx = 100.0;
    double cy = 100.0;
    double radius = 30.0;
    int fg = 60;
    int bg = 160;
    /// Uniform integer noise in [-noise, noise] added to every pixel.
    int noise = 10;
    std::uint64_t rng_seed = 1;
    double spacing_mm = 1.0;
    std::optional<PhantomSector> sector;

    /// Throws InvalidArgument for a disk that does not fit the image, bad sizes or intensities.
    void validate() const;
};

struct Phantom {
    GrayImage image;
    /// Pixel (x, y) is lesion iff (x - cx)^2 + (y - cy)^2 <= r^2.
    BinaryMask truth;
};

/// Deterministic for a given spec (noise from a 64-bit Mersenne Twister seeded with rng_seed).
Phantom make_phantom(const PhantomSpec& spec);

/// Same spec with fg and bg swapped.
PhantomSpec inverted(PhantomSpec spec);

} // namespace uscut
