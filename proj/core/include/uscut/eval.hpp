#pragma once

#include "uscut/config.hpp"
#include "uscut/metrics.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uscut::eval {

/// One case of a batch run. Paths are absolute or relative to the manifest.
struct CaseRecord {
    std::string case_id;
    std::filesystem::path image;
    std::filesystem::path manual_mask;
    /// Seed file with `seed x y` / `helper x y` lines.
    std::filesystem::path seeds;
    std::optional<bool> satisfied;
    std::optional<double> manual_time_s;
};

struct RunManifest {
    std::vector<CaseRecord> cases;
    /// Fingerprint the run expects; checked against the active config when set.
    std::optional<std::string> config_fingerprint;
    std::filesystem::path output_dir;
};

/// Reads a JSON manifest (schema in docs/manifest.md). Relative paths are
/// resolved against the manifest's directory. Throws IoError for unreadable
/// or malformed documents and InvalidArgument for duplicate case ids.
RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);

struct CaseReport {
    std::string case_id;
    /// Unset when the case failed; `error` then carries the reason.
    std::optional<metrics::MetricsReport> metrics;
    std::string error;

    bool ok() const noexcept { return metrics.has_value(); }
    friend bool operator==(const CaseReport&, const CaseReport&) = default;
};

/// Loads the case files, runs segment() and compares against the manual
/// mask. Never throws: failures become a report with `error` set.
/// auto_time covers the segment() call only.
CaseReport evaluate_case(const CaseRecord& record, const TemplateConfig& cfg);

/// Evaluates every case on up to `threads` workers (0 = hardware concurrency).
/// The result is ordered by case_id regardless of completion order.
std::vector<CaseReport> evaluate_manifest(const RunManifest& manifest, const TemplateConfig& cfg,
                                          unsigned threads = 0);

/// Summary row names, in output order.
inline constexpr const char* kSummaryMetrics[] = {"dsc", "hd_px", "diff_a_mm", "diff_b_mm", "auto_time_s",
                                                  "manual_time_s"};

/// Median/MAD per metric over the reports (only satisfied ones when
/// `satisfied_only`). total_cases and satisfied_cases count the input list.
/// Throws InvalidArgument when nothing is left after filtering.
metrics::EvalSummary summarize(std::span<const metrics::MetricsReport> reports, bool satisfied_only);

/// Successful reports of a batch, in order.
std::vector<metrics::MetricsReport> successful(std::span<const CaseReport> reports);

enum class Format { csv, txt };

inline constexpr const char* kCaseCsvHeader =
    "case_id,dsc,hd_px,diff_a_mm,diff_b_mm,auto_time_s,manual_time_s,satisfied,error";

std::string format_case_csv(std::span<const CaseReport> reports);
/// Inverse of format_case_csv. Throws IoError on malformed input.
std::vector<CaseReport> parse_case_csv(const std::string& text);

/// Long form: `metric,n,median,mad`, one row per metric.
std::string format_summary_csv(const metrics::EvalSummary& summary);
/// Aligned table: metric columns, each split into median and MAD.
std::string format_summary_table(const metrics::EvalSummary& summary);

/// Writes cases.csv, summary.csv or summary.txt (per `format`) and
/// run_meta.json into `dir`. Throws IoError when the directory is unwritable.
void emit_report(const std::filesystem::path& dir, const metrics::EvalSummary& summary,
                 std::span<const CaseReport> reports, Format format, const TemplateConfig& cfg);

} // namespace uscut::eval
