#include "uscut/eval.hpp"

#include "uscut/error.hpp"
#include "uscut/image_io.hpp"
#include "uscut/result_io.hpp"
#include "uscut/segment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <thread>

namespace uscut::eval {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

// Splits RFC 4180 text into records of fields.
std::vector<std::vector<std::string>> split_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            field_started = false;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) {
        throw IoError("unterminated quoted field in CSV");
    }
    if (field_started || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw IoError("bad number in CSV: '" + s + "'");
    }
    return v;
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad_left(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

RunManifest load_manifest(const std::filesystem::path& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    const auto base = path.parent_path();
    RunManifest m;
    try {
        if (j.value("version", 1) != 1) {
            throw IoError("unsupported manifest version");
        }
        if (j.contains("config_fingerprint") && !j["config_fingerprint"].is_null()) {
            m.config_fingerprint = j["config_fingerprint"].get<std::string>();
        }
        m.output_dir = resolve(base, j.value("output_dir", std::string("eval_out")));
        std::set<std::string> ids;
        for (const auto& c : j.at("cases")) {
            CaseRecord r;
            r.case_id = c.at("case_id").get<std::string>();
            r.image = resolve(base, c.at("image").get<std::string>());
            r.manual_mask = resolve(base, c.at("manual_mask").get<std::string>());
            r.seeds = resolve(base, c.at("seeds").get<std::string>());
            if (c.contains("satisfied") && !c["satisfied"].is_null()) {
                r.satisfied = c["satisfied"].get<bool>();
            }
            if (c.contains("manual_time_s") && !c["manual_time_s"].is_null()) {
                r.manual_time_s = c["manual_time_s"].get<double>();
            }
            if (r.case_id.empty()) {
                throw InvalidArgument("empty case_id in manifest");
            }
            if (!ids.insert(r.case_id).second) {
                throw InvalidArgument("duplicate case_id '" + r.case_id + "' in manifest");
            }
            m.cases.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest " + path.string() + ": " + e.what());
    }
    return m;
}

void save_manifest(const std::filesystem::path& path, const RunManifest& manifest)
{
    const auto base = path.parent_path();
    auto rel = [&](const std::filesystem::path& p) {
        return (p.is_absolute() && !base.empty() ? p.lexically_relative(base) : p).generic_string();
    };
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& r : manifest.cases) {
        nlohmann::json c = {
            {"case_id", r.case_id},
            {"image", rel(r.image)},
            {"manual_mask", rel(r.manual_mask)},
            {"seeds", rel(r.seeds)},
        };
        if (r.satisfied) {
            c["satisfied"] = *r.satisfied;
        }
        if (r.manual_time_s) {
            c["manual_time_s"] = *r.manual_time_s;
        }
        cases.push_back(std::move(c));
    }
    nlohmann::json j = {{"version", 1}, {"output_dir", rel(manifest.output_dir)}, {"cases", cases}};
    if (manifest.config_fingerprint) {
        j["config_fingerprint"] = *manifest.config_fingerprint;
    }
    write_text_file(path, j.dump(2) + "\n");
}

CaseReport evaluate_case(const CaseRecord& record, const TemplateConfig& cfg)
{
    CaseReport report;
    report.case_id = record.case_id;
    try {
        const GrayImage image = load_image(record.image);
        const BinaryMask manual = load_mask(record.manual_mask);
        const SeedFile seeds = read_seed_file(record.seeds);
        if (manual.width() != image.width() || manual.height() != image.height()) {
            throw InvalidArgument("manual mask size differs from image size");
        }
        if (manual.empty()) {
            throw InvalidArgument("manual mask is empty");
        }

        const auto start = std::chrono::steady_clock::now();
        const SegmentationResult result = segment(image, seeds.seed, seeds.helpers, cfg);
        const double auto_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const auto manual_d = metrics::diameters(manual, image.spacing());
        metrics::MetricsReport m;
        m.dsc = metrics::dice(result.mask, manual);
        m.hd = metrics::hausdorff(result.mask, manual);
        m.diff_a = std::abs(manual_d.a - result.diameter_a);
        m.diff_b = std::abs(manual_d.b - result.diameter_b);
        m.auto_time = auto_time;
        m.manual_time = record.manual_time_s;
        m.satisfied = record.satisfied;
        report.metrics = m;
    } catch (const std::exception& e) {
        report.metrics.reset();
        report.error = e.what();
    }
    return report;
}

std::vector<CaseReport> evaluate_manifest(const RunManifest& manifest, const TemplateConfig& cfg, unsigned threads)
{
    const std::size_t n = manifest.cases.size();
    std::vector<CaseReport> reports(n);
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            reports[i] = evaluate_case(manifest.cases[i], cfg);
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    std::sort(reports.begin(), reports.end(),
              [](const CaseReport& a, const CaseReport& b) { return a.case_id < b.case_id; });
    return reports;
}

metrics::EvalSummary summarize(std::span<const metrics::MetricsReport> reports, bool satisfied_only)
{
    metrics::EvalSummary s;
    s.satisfied_only = satisfied_only;
    s.total_cases = reports.size();
    std::vector<const metrics::MetricsReport*> kept;
    for (const auto& r : reports) {
        const bool sat = r.satisfied.value_or(false);
        s.satisfied_cases += sat ? 1 : 0;
        if (!satisfied_only || sat) {
            kept.push_back(&r);
        }
    }
    if (kept.empty()) {
        throw InvalidArgument("no reports to summarize after filtering");
    }

    auto add_row = [&](const char* name, auto&& get) {
        std::vector<double> values;
        for (const auto* r : kept) {
            if (const std::optional<double> v = get(*r)) {
                values.push_back(*v);
            }
        }
        metrics::SummaryRow row;
        row.metric = name;
        row.n = values.size();
        if (!values.empty()) {
            row.value = metrics::median_mad(values);
        }
        s.rows.push_back(std::move(row));
    };
    using R = metrics::MetricsReport;
    add_row("dsc", [](const R& r) { return std::optional<double>(r.dsc); });
    add_row("hd_px", [](const R& r) { return std::optional<double>(r.hd); });
    add_row("diff_a_mm", [](const R& r) { return std::optional<double>(r.diff_a); });
    add_row("diff_b_mm", [](const R& r) { return std::optional<double>(r.diff_b); });
    add_row("auto_time_s", [](const R& r) { return std::optional<double>(r.auto_time); });
    add_row("manual_time_s", [](const R& r) { return r.manual_time; });
    return s;
}

std::vector<metrics::MetricsReport> successful(std::span<const CaseReport> reports)
{
    std::vector<metrics::MetricsReport> out;
    for (const auto& r : reports) {
        if (r.metrics) {
            out.push_back(*r.metrics);
        }
    }
    return out;
}

std::string format_case_csv(std::span<const CaseReport> reports)
{
    std::string out = kCaseCsvHeader;
    out += '\n';
    for (const auto& r : reports) {
        out += csv_field(r.case_id);
        if (r.metrics) {
            const auto& m = *r.metrics;
            for (double v : {m.dsc, m.hd, m.diff_a, m.diff_b, m.auto_time}) {
                out += ',' + format_number(v);
            }
            out += ',' + (m.manual_time ? format_number(*m.manual_time) : std::string());
            out += ',' + (m.satisfied ? std::string(*m.satisfied ? "true" : "false") : std::string());
            out += ',';
        } else {
            out += ",,,,,,,,";
        }
        out += csv_field(r.error);
        out += '\n';
    }
    return out;
}

std::vector<CaseReport> parse_case_csv(const std::string& text)
{
    auto rows = split_csv(text);
    if (rows.empty()) {
        throw IoError("empty case table");
    }
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        header += (i ? "," : "") + rows[0][i];
    }
    if (header != kCaseCsvHeader) {
        throw IoError("unexpected case table header: " + header);
    }
    std::vector<CaseReport> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 9) {
            throw IoError("case table row " + std::to_string(i) + " has " + std::to_string(f.size()) + " fields");
        }
        CaseReport r;
        r.case_id = f[0];
        r.error = f[8];
        if (!f[1].empty()) {
            metrics::MetricsReport m;
            m.dsc = parse_double(f[1]);
            m.hd = parse_double(f[2]);
            m.diff_a = parse_double(f[3]);
            m.diff_b = parse_double(f[4]);
            m.auto_time = parse_double(f[5]);
            if (!f[6].empty()) {
                m.manual_time = parse_double(f[6]);
            }
            if (f[7] == "true" || f[7] == "false") {
                m.satisfied = f[7] == "true";
            } else if (!f[7].empty()) {
                throw IoError("bad satisfied value: '" + f[7] + "'");
            }
            r.metrics = m;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_summary_csv(const metrics::EvalSummary& summary)
{
    std::string out = "metric,n,median,mad\n";
    for (const auto& row : summary.rows) {
        out += row.metric + ',' + std::to_string(row.n) + ',';
        if (row.value) {
            out += format_number(row.value->median) + ',' + format_number(row.value->mad);
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

std::string format_summary_table(const metrics::EvalSummary& summary)
{
    struct Column {
        const char* metric;
        const char* title;
        double scale;
        int digits;
    };
    static constexpr Column columns[] = {
        {"dsc", "DSC (%)", 100.0, 1},          {"hd_px", "HD (px)", 1.0, 2},
        {"diff_a_mm", "Diff a (mm)", 1.0, 2},  {"diff_b_mm", "Diff b (mm)", 1.0, 2},
        {"auto_time_s", "Auto (s)", 1.0, 4},   {"manual_time_s", "Manual (s)", 1.0, 1},
    };
    constexpr std::size_t cell = 9;

    std::string label = summary.satisfied_only ? "satisfied" : "all";
    label += " (n=" + std::to_string(summary.row("dsc").n) + ")";
    const std::size_t label_width = std::max<std::size_t>(label.size(), 6);

    std::string line1 = pad_right("", label_width);
    std::string line2 = pad_right("", label_width);
    std::string data = pad_right(label, label_width);
    std::string counts = pad_right("n", label_width);
    for (const auto& c : columns) {
        const auto& row = summary.row(c.metric);
        line1 += " | " + pad_right(c.title, 2 * cell + 1);
        line2 += " | " + pad_left("Median", cell) + " " + pad_left("MAD", cell);
        std::string med = "-";
        std::string mad = "-";
        if (row.value) {
            med = fixed(row.value->median * c.scale, c.digits);
            mad = fixed(row.value->mad * c.scale, c.digits);
        }
        data += " | " + pad_left(med, cell) + " " + pad_left(mad, cell);
        counts += " | " + pad_left(std::to_string(row.n), 2 * cell + 1);
    }
    std::string out = line1 + '\n' + line2 + '\n' + data + '\n' + counts + '\n';
    char rate[128];
    std::snprintf(rate, sizeof rate, "satisfied: %zu of %zu (%.0f%%)\n", summary.satisfied_cases,
                  summary.total_cases, 100.0 * summary.satisfaction_rate());
    out += rate;
    return out;
}

void emit_report(const std::filesystem::path& dir, const metrics::EvalSummary& summary,
                 std::span<const CaseReport> reports, Format format, const TemplateConfig& cfg)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    write_text_file(dir / "cases.csv", format_case_csv(reports));
    if (format == Format::csv) {
        write_text_file(dir / "summary.csv", format_summary_csv(summary));
    } else {
        write_text_file(dir / "summary.txt", format_summary_table(summary));
    }
    std::size_t failed = 0;
    for (const auto& r : reports) {
        failed += r.ok() ? 0 : 1;
    }
    const nlohmann::json meta = {
        {"config_fingerprint", cfg.fingerprint()},
        {"config_is_default", cfg.is_default()},
        {"cases", reports.size()},
        {"failed_cases", failed},
        {"satisfied_only", summary.satisfied_only},
        {"timing_note", "auto_time_s is wall-clock time of the segment() call only; manual_time_s is human "
                        "interaction time. The two are not comparable."},
    };
    write_text_file(dir / "run_meta.json", meta.dump(2) + "\n");
}

} // namespace uscut::eval
