#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace uscut {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// 8-bit grayscale raster, row-major, with isotropic physical spacing.
///
/// Pixel (x, y) has its center at the continuous coordinate (x, y); the same
/// frame is used for seeds, ray geometry and rasterization.
class GrayImage {
public:
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels, double spacing_mm = 1.0);
    GrayImage(int width, int height, std::uint8_t fill, double spacing_mm = 1.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double spacing() const noexcept { return spacing_; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    std::uint8_t at(int x, int y) const noexcept { return pixels_[index(x, y)]; }
    void set(int x, int y, std::uint8_t v) noexcept { pixels_[index(x, y)] = v; }
    bool contains(double x, double y) const noexcept;

    /// Bilinear interpolation; coordinates outside the raster are clamped to the border.
    double sample_bilinear(double x, double y) const noexcept;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
    double spacing_;
};

/// Row-major occupancy grid; true marks lesion.
class BinaryMask {
public:
    BinaryMask(int width, int height);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
    /// Out-of-bounds reads return false.
    bool get(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
    }
    void set(int x, int y, bool v) noexcept { bits_[index(x, y)] = v ? 1 : 0; }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    bool same_shape(const BinaryMask& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// 0/1 bytes, row-major.
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Implicitly closed polygon in continuous pixel coordinates.
struct ContourPolygon {
    std::vector<Point2> vertices;
};

/// Even-odd fill evaluated at pixel centers. A center lying exactly on an edge
/// counts as inside. Throws InvalidArgument for fewer than three vertices.
BinaryMask rasterize(const ContourPolygon& polygon, int width, int height);

/// Area of the set pixels in mm^2.
double mask_area(const BinaryMask& mask, double spacing_mm);

/// Set pixels with at least one unset (or out-of-bounds) 4-neighbour.
std::vector<Point2> boundary_points(const BinaryMask& mask);

} // namespace uscut
