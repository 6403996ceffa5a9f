#pragma once

#include "uscut/config.hpp"
#include "uscut/imaging.hpp"
#include "uscut/template_cut.hpp"

#include <span>
#include <vector>

namespace uscut {

struct SegmentationResult {
    IntensityStats stats;
    double max_radius = 0.0;
    /// Lesion samples per ray (1..samples).
    std::vector<int> cut_index;
    std::vector<double> cut_radius;
    ContourPolygon contour;
    BinaryMask mask{1, 1};
    double diameter_a = 0.0;
    double diameter_b = 0.0;
    Point2 axis_a{1.0, 0.0};
    /// Minimal cut value (energy of the returned contour).
    double cut_cost = 0.0;
    double elapsed_ms = 0.0;
};

/// Seed -> gray-value model -> template graph -> minimal s-t cut -> contour
/// -> mask -> diameters. Pure; `elapsed_ms` is the only non-deterministic field.
///
/// Diameters are measured on the mask's boundary pixels, the same way manual
/// masks are measured. Throws InvalidArgument for invalid config, a seed
/// outside the image or conflicting helper seeds.
SegmentationResult segment(const GrayImage& image, SeedPoint seed, std::span<const HelperSeed> helpers,
                           const TemplateConfig& cfg = {});

} // namespace uscut
