#include "uscut/metrics.hpp"

#include "uscut/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uscut::metrics {
namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b)
{
    if (!a.same_shape(b)) {
        throw InvalidArgument("mask dimensions differ");
    }
}

// Squared Euclidean distance transform to the set pixels of `features`
// (Felzenszwalb & Huttenlocher lower-envelope passes, rows then columns).
std::vector<double> squared_distance_map(const std::vector<Point2>& features, int width, int height)
{
    constexpr double kFar = 1e20;
    std::vector<double> grid(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kFar);
    for (const auto& p : features) {
        grid[static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p.x)] = 0.0;
    }

    const int n_max = std::max(width, height);
    std::vector<double> f(static_cast<std::size_t>(n_max));
    std::vector<double> d(static_cast<std::size_t>(n_max));
    std::vector<int> v(static_cast<std::size_t>(n_max));
    std::vector<double> z(static_cast<std::size_t>(n_max) + 1);

    auto transform_1d = [&](int n) {
        int k = 0;
        v[0] = 0;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        for (int q = 1; q < n; ++q) {
            auto intersect = [&](int vk) {
                return ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
                        (f[static_cast<std::size_t>(vk)] + static_cast<double>(vk) * vk)) /
                       (2.0 * q - 2.0 * vk);
            };
            double s = intersect(v[static_cast<std::size_t>(k)]);
            // z[0] is -inf, so this stops at k == 0.
            while (s <= z[static_cast<std::size_t>(k)]) {
                --k;
                s = intersect(v[static_cast<std::size_t>(k)]);
            }
            ++k;
            v[static_cast<std::size_t>(k)] = q;
            z[static_cast<std::size_t>(k)] = s;
            z[static_cast<std::size_t>(k) + 1] = std::numeric_limits<double>::infinity();
        }
        k = 0;
        for (int q = 0; q < n; ++q) {
            while (z[static_cast<std::size_t>(k) + 1] < q) {
                ++k;
            }
            const int vk = v[static_cast<std::size_t>(k)];
            const double dq = q - vk;
            d[static_cast<std::size_t>(q)] = dq * dq + f[static_cast<std::size_t>(vk)];
        }
    };

    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            f[static_cast<std::size_t>(y)] = grid[static_cast<std::size_t>(y) * width + x];
        }
        transform_1d(height);
        for (int y = 0; y < height; ++y) {
            grid[static_cast<std::size_t>(y) * width + x] = d[static_cast<std::size_t>(y)];
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            f[static_cast<std::size_t>(x)] = grid[static_cast<std::size_t>(y) * width + x];
        }
        transform_1d(width);
        for (int x = 0; x < width; ++x) {
            grid[static_cast<std::size_t>(y) * width + x] = d[static_cast<std::size_t>(x)];
        }
    }
    return grid;
}

double directed_hausdorff(const std::vector<Point2>& from, const std::vector<double>& dist_to, int width)
{
    double worst = 0.0;
    for (const auto& p : from) {
        worst = std::max(worst, dist_to[static_cast<std::size_t>(p.y) * width + static_cast<std::size_t>(p.x)]);
    }
    return worst;
}

double cross(const Point2& o, const Point2& a, const Point2& b)
{
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; collinear points dropped.
std::vector<Point2> convex_hull(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(), [](const Point2& l, const Point2& r) {
        return l.x < r.x || (l.x == r.x && l.y < r.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
            --k;
        }
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

// Direction of p->q folded into [0, pi), as a unit vector and its angle.
std::pair<Point2, double> folded_axis(const Point2& p, const Point2& q)
{
    double dx = q.x - p.x;
    double dy = q.y - p.y;
    if (dy < 0.0 || (dy == 0.0 && dx < 0.0)) {
        dx = -dx;
        dy = -dy;
    }
    const double len = std::hypot(dx, dy);
    return {{dx / len, dy / len}, std::atan2(dy, dx)};
}

} // namespace

double dice(const BinaryMask& a, const BinaryMask& b)
{
    require_same_shape(a, b);
    std::size_t na = 0;
    std::size_t nb = 0;
    std::size_t both = 0;
    const auto ba = a.bits();
    const auto bb = b.bits();
    for (std::size_t i = 0; i < ba.size(); ++i) {
        na += ba[i];
        nb += bb[i];
        both += ba[i] & bb[i];
    }
    if (na + nb == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

double hausdorff(const BinaryMask& a, const BinaryMask& b)
{
    require_same_shape(a, b);
    if (a.empty() || b.empty()) {
        throw InvalidArgument("undefined HD: empty mask");
    }
    const auto ba = boundary_points(a);
    const auto bb = boundary_points(b);
    const auto to_b = squared_distance_map(bb, b.width(), b.height());
    const auto to_a = squared_distance_map(ba, a.width(), a.height());
    const double d2 = std::max(directed_hausdorff(ba, to_b, a.width()), directed_hausdorff(bb, to_a, a.width()));
    return std::sqrt(d2);
}

Diameters diameters(std::span<const Point2> points, double spacing_mm)
{
    if (points.size() < 2) {
        throw InvalidArgument("diameters need at least 2 points");
    }
    const auto hull = convex_hull({points.begin(), points.end()});

    Diameters out;
    if (hull.size() < 2) {
        out.axis_a = {1.0, 0.0};
        return out;
    }
    double best_d2 = -1.0;
    double best_angle = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            const double dx = hull[j].x - hull[i].x;
            const double dy = hull[j].y - hull[i].y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                continue;
            }
            const auto [axis, angle] = folded_axis(hull[i], hull[j]);
            if (d2 > best_d2 || angle < best_angle) {
                best_d2 = d2;
                best_angle = angle;
                out.axis_a = axis;
            }
        }
    }
    const Point2 perp{-out.axis_a.y, out.axis_a.x};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : hull) {
        const double t = p.x * perp.x + p.y * perp.y;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    out.a = std::sqrt(best_d2) * spacing_mm;
    out.b = (hi - lo) * spacing_mm;
    return out;
}

Diameters diameters(const BinaryMask& mask, double spacing_mm)
{
    const auto pts = boundary_points(mask);
    return diameters(pts, spacing_mm);
}

MedianMad median_mad(std::span<const double> values)
{
    if (values.empty()) {
        throw InvalidArgument("median of an empty list");
    }
    // Sorting first also fixes the summation order, so the result does not
    // depend on the order of the input.
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    double dev = 0.0;
    for (double x : v) {
        dev += std::abs(x - median);
    }
    return {median, dev / static_cast<double>(n)};
}

const SummaryRow& EvalSummary::row(const std::string& metric) const
{
    for (const auto& r : rows) {
        if (r.metric == metric) {
            return r;
        }
    }
    throw InvalidArgument("no summary row for metric '" + metric + "'");
}

} // namespace uscut::metrics
