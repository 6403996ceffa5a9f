#include "uscut/imaging.hpp"

#include "uscut/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace uscut {

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels, double spacing_mm)
    : width_(width), height_(height), pixels_(std::move(pixels)), spacing_(spacing_mm)
{
    if (width < 1 || height < 1) {
        throw InvalidArgument("zero-sized image");
    }
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("pixel buffer size " + std::to_string(pixels_.size()) + " does not match " +
                              std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(spacing_mm > 0.0) || !std::isfinite(spacing_mm)) {
        throw InvalidArgument("pixel spacing must be positive");
    }
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill, double spacing_mm)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill),
                spacing_mm)
{
}

bool GrayImage::contains(double x, double y) const noexcept
{
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1;
}

double GrayImage::sample_bilinear(double x, double y) const noexcept
{
    x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
    const double bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
    return (1.0 - fy) * top + fy * bottom;
}

BinaryMask::BinaryMask(int width, int height)
    : BinaryMask(width, height,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0))))
{
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits))
{
    if (width < 1 || height < 1) {
        throw InvalidArgument("zero-sized mask");
    }
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("mask buffer size does not match its dimensions");
    }
    for (auto& b : bits_) {
        b = b != 0 ? 1 : 0;
    }
}

std::size_t BinaryMask::count() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

bool on_segment(const Point2& p, const Point2& q, double x, double y)
{
    const double cross = (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x);
    if (cross != 0.0) {
        return false;
    }
    return x >= std::min(p.x, q.x) && x <= std::max(p.x, q.x) && y >= std::min(p.y, q.y) &&
           y <= std::max(p.y, q.y);
}

} // namespace

BinaryMask rasterize(const ContourPolygon& polygon, int width, int height)
{
    const auto& v = polygon.vertices;
    if (v.size() < 3) {
        throw InvalidArgument("degenerate polygon: need at least 3 vertices");
    }
    BinaryMask mask(width, height);

    double ymin = v[0].y;
    double ymax = v[0].y;
    for (const auto& p : v) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int row_begin = std::max(0, static_cast<int>(std::ceil(ymin)));
    const int row_end = std::min(height - 1, static_cast<int>(std::floor(ymax)));

    // Interior spans: a center is inside when an odd number of edge crossings
    // lie strictly to its right (half-open rule on the edge's y extent).
    std::vector<double> crossings;
    for (int y = row_begin; y <= row_end; ++y) {
        crossings.clear();
        const double py = y;
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            const Point2& a = v[i];
            const Point2& b = v[j];
            if ((a.y > py) != (b.y > py)) {
                crossings.push_back((b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x);
            }
        }
        std::sort(crossings.begin(), crossings.end());
        for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
            const double lo = std::ceil(crossings[k]);
            const double hi = std::ceil(crossings[k + 1]) - 1.0;
            const int x_begin = static_cast<int>(std::max(lo, 0.0));
            const int x_end = static_cast<int>(std::min(hi, static_cast<double>(width - 1)));
            for (int x = x_begin; x <= x_end; ++x) {
                mask.set(x, y, true);
            }
        }
    }

    // Centers lying exactly on an edge are inside.
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Point2& a = v[j];
        const Point2& b = v[i];
        const int y_lo = std::max(0, static_cast<int>(std::ceil(std::min(a.y, b.y))));
        const int y_hi = std::min(height - 1, static_cast<int>(std::floor(std::max(a.y, b.y))));
        for (int y = y_lo; y <= y_hi; ++y) {
            int x_lo = 0;
            int x_hi = -1;
            if (a.y == b.y) {
                x_lo = static_cast<int>(std::ceil(std::min(a.x, b.x)));
                x_hi = static_cast<int>(std::floor(std::max(a.x, b.x)));
            } else {
                const double xc = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
                x_lo = static_cast<int>(std::floor(xc)) - 1;
                x_hi = static_cast<int>(std::ceil(xc)) + 1;
            }
            x_lo = std::max(x_lo, 0);
            x_hi = std::min(x_hi, width - 1);
            for (int x = x_lo; x <= x_hi; ++x) {
                if (!mask.at(x, y) && on_segment(a, b, x, y)) {
                    mask.set(x, y, true);
                }
            }
        }
    }
    return mask;
}

double mask_area(const BinaryMask& mask, double spacing_mm)
{
    return static_cast<double>(mask.count()) * spacing_mm * spacing_mm;
}

std::vector<Point2> boundary_points(const BinaryMask& mask)
{
    std::vector<Point2> points;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) {
                continue;
            }
            if (!mask.get(x - 1, y) || !mask.get(x + 1, y) || !mask.get(x, y - 1) || !mask.get(x, y + 1)) {
                points.push_back({static_cast<double>(x), static_cast<double>(y)});
            }
        }
    }
    return points;
}

} // namespace uscut
