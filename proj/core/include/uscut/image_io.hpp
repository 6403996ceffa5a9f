#pragma once

#include "uscut/imaging.hpp"

#include <filesystem>
#include <optional>

namespace uscut {

/// Reads an 8-bit grayscale PGM (P5, maxval 255) or PNG, detected by magic bytes.
///
/// Spacing comes from `spacing_override` when given, otherwise from the
/// `<path>.meta` sidecar (`spacing_mm_per_px = <float>`), otherwise 1.0.
/// Throws IoError for unreadable or unsupported files ("unsupported bit depth"
/// for 16-bit data) and InvalidArgument for anisotropic spacing.
GrayImage load_image(const std::filesystem::path& path, std::optional<double> spacing_override = std::nullopt);

/// Format is chosen from the extension: `.pgm` writes P5, anything else PNG.
void save_image(const std::filesystem::path& path, const GrayImage& image);

/// Any nonzero sample loads as true.
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes 0 for background and 255 for lesion.
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Spacing from `<image>.meta`; nullopt when the sidecar is absent.
std::optional<double> read_spacing_sidecar(const std::filesystem::path& image_path);
void write_spacing_sidecar(const std::filesystem::path& image_path, double spacing_mm);

} // namespace uscut
