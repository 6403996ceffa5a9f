#pragma once

#include "uscut/config.hpp"
#include "uscut/imaging.hpp"
#include "uscut/segment.hpp"
#include "uscut/template_cut.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace uscut {

/// Contents of a seed file: one `seed <x> <y>` line plus any number of
/// `helper <x> <y>` lines. Blank lines and lines starting with '#' are ignored.
struct SeedFile {
    SeedPoint seed;
    std::vector<HelperSeed> helpers;
};

SeedFile parse_seed_file(const std::string& text);
SeedFile read_seed_file(const std::filesystem::path& path);
std::string format_seed_file(const SeedFile& seeds);
void write_seed_file(const std::filesystem::path& path, const SeedFile& seeds);

/// Names of the files written by write_result().
inline constexpr const char* kMaskFile = "mask.png";
inline constexpr const char* kContourFile = "contour.txt";
inline constexpr const char* kResultFile = "result.json";
inline constexpr const char* kTimingFile = "timing.json";

/// `x y` per vertex, shortest round-trip decimal form.
std::string format_contour(const ContourPolygon& contour);

/// The deterministic result record (everything but elapsed time).
std::string format_result_record(const SegmentationResult& result, const GrayImage& image, const SeedFile& seeds,
                                 const TemplateConfig& cfg);

/// Writes mask.png, contour.txt, result.json and timing.json into `dir`,
/// creating it if needed. All files except timing.json depend only on the
/// inputs, so repeated runs produce identical bytes. Throws IoError.
void write_result(const std::filesystem::path& dir, const SegmentationResult& result, const GrayImage& image,
                  const SeedFile& seeds, const TemplateConfig& cfg);

/// Writes `text` to `path` in binary mode. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double v);

} // namespace uscut
