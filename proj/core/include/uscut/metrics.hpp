#pragma once

#include "uscut/imaging.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uscut::metrics {

/// 2|A n B| / (|A| + |B|); 1.0 when both masks are empty.
/// Throws InvalidArgument on a dimension mismatch.
double dice(const BinaryMask& a, const BinaryMask& b);

/// Symmetric Hausdorff distance in pixels between the boundary-pixel sets of
/// two masks. Throws InvalidArgument when either mask is empty ("undefined HD").
double hausdorff(const BinaryMask& a, const BinaryMask& b);

struct Diameters {
    /// Largest pairwise distance, mm.
    double a = 0.0;
    /// Width perpendicular to axis_a (max - min projection), mm.
    double b = 0.0;
    /// Unit direction of diameter a, angle in [0, pi).
    Point2 axis_a{1.0, 0.0};
};

/// Caliper diameters of a point set. Among equally long pairs the axis with
/// the smallest angle in [0, pi) wins. Throws InvalidArgument for < 2 points.
Diameters diameters(std::span<const Point2> points, double spacing_mm);

/// Same, over the boundary pixels of a mask.
Diameters diameters(const BinaryMask& mask, double spacing_mm);

struct MedianMad {
    double median = 0.0;
    /// Mean absolute deviation about the median.
    double mad = 0.0;
};

/// Throws InvalidArgument on an empty input.
MedianMad median_mad(std::span<const double> values);

/// Per-case comparison of an algorithmic segmentation against a manual one.
struct MetricsReport {
    double dsc = 0.0;
    double hd = 0.0;
    double diff_a = 0.0;
    double diff_b = 0.0;
    double auto_time = 0.0;
    std::optional<double> manual_time;
    std::optional<bool> satisfied;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct SummaryRow {
    std::string metric;
    std::size_t n = 0;
    /// Unset when no case contributes.
    std::optional<MedianMad> value;
};

struct EvalSummary {
    std::vector<SummaryRow> rows;
    bool satisfied_only = false;
    std::size_t total_cases = 0;
    std::size_t satisfied_cases = 0;

    double satisfaction_rate() const
    {
        return total_cases == 0 ? 0.0 : static_cast<double>(satisfied_cases) / static_cast<double>(total_cases);
    }
    const SummaryRow& row(const std::string& metric) const;
};

} // namespace uscut::metrics
