#include "uscut/image_io.hpp"

#include "uscut/error.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace uscut {
namespace {

struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bytes;
    // Pixels-per-unit from a PNG pHYs chunk, when present.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> physical;
};

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return f;
}

// ---------------------------------------------------------------- PGM

void skip_pgm_space(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            in.get();
        } else {
            return;
        }
    }
}

long read_pgm_int(std::istream& in, const std::string& path)
{
    skip_pgm_space(in);
    long value = -1;
    if (!(in >> value)) {
        throw IoError("malformed PGM header in '" + path + "'");
    }
    return value;
}

Raster read_pgm(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::array<char, 2> magic{};
    in.read(magic.data(), 2);
    if (magic[0] != 'P' || magic[1] != '5') {
        throw IoError("unsupported PGM variant in '" + path.string() + "' (only binary P5)");
    }
    const long width = read_pgm_int(in, path.string());
    const long height = read_pgm_int(in, path.string());
    const long maxval = read_pgm_int(in, path.string());
    if (width <= 0 || height <= 0) {
        throw IoError("zero-sized image in '" + path.string() + "'");
    }
    if (maxval > 255) {
        throw IoError("unsupported bit depth in '" + path.string() + "'");
    }
    if (maxval != 255) {
        throw IoError("unsupported PGM maxval " + std::to_string(maxval) + " in '" + path.string() + "'");
    }
    in.get(); // the single whitespace byte that ends the header
    Raster r;
    r.width = static_cast<int>(width);
    r.height = static_cast<int>(height);
    r.bytes.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    in.read(reinterpret_cast<char*>(r.bytes.data()), static_cast<std::streamsize>(r.bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(r.bytes.size())) {
        throw IoError("truncated pixel data in '" + path.string() + "'");
    }
    return r;
}

void write_pgm(const std::filesystem::path& path, int width, int height, const std::uint8_t* data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(static_cast<std::size_t>(width) * static_cast<std::size_t>(height)));
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------- PNG

struct PngReadState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    char message[256] = {};
    ~PngReadState() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

void png_error_to_jmp(png_structp png, png_const_charp msg)
{
    auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof(state->message), "%s", msg);
    png_longjmp(png, 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

enum class PngStatus { ok, libpng_error, not_gray, bad_depth };

// Only trivially destructible locals live between setjmp and the decode calls.
PngStatus decode_png(std::FILE* file, PngReadState& state, Raster& out, std::vector<png_bytep>& rows)
{
    if (setjmp(png_jmpbuf(state.png))) {
        return PngStatus::libpng_error;
    }
    png_init_io(state.png, file);
    png_read_info(state.png, state.info);
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
    png_get_IHDR(state.png, state.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
        return PngStatus::not_gray;
    }
    if (bit_depth != 8) {
        return PngStatus::bad_depth;
    }
    png_uint_32 res_x = 0;
    png_uint_32 res_y = 0;
    int unit = 0;
    if (png_get_pHYs(state.png, state.info, &res_x, &res_y, &unit) != 0) {
        out.physical = std::make_pair(res_x, res_y);
    }
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.bytes.resize(static_cast<std::size_t>(width) * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = out.bytes.data() + static_cast<std::size_t>(y) * width;
    }
    png_read_image(state.png, rows.data());
    png_read_end(state.png, nullptr);
    return PngStatus::ok;
}

Raster read_png(const std::filesystem::path& path)
{
    FilePtr file = open_file(path, "rb");
    PngReadState state;
    state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_to_jmp, png_warning_ignore);
    if (state.png == nullptr) {
        throw IoError("libpng initialisation failed");
    }
    state.info = png_create_info_struct(state.png);
    if (state.info == nullptr) {
        throw IoError("libpng initialisation failed");
    }
    Raster raster;
    std::vector<png_bytep> rows;
    switch (decode_png(file.get(), state, raster, rows)) {
    case PngStatus::ok:
        break;
    case PngStatus::libpng_error:
        throw IoError("cannot decode PNG '" + path.string() + "': " + state.message);
    case PngStatus::not_gray:
        throw IoError("unsupported color type in '" + path.string() + "' (8-bit grayscale required)");
    case PngStatus::bad_depth:
        throw IoError("unsupported bit depth in '" + path.string() + "'");
    }
    if (raster.width == 0 || raster.height == 0) {
        throw IoError("zero-sized image in '" + path.string() + "'");
    }
    return raster;
}

void write_png(const std::filesystem::path& path, int width, int height, const std::uint8_t* data)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = PNG_FORMAT_GRAY;
    if (png_image_write_to_file(&image, path.string().c_str(), 0, data, 0, nullptr) == 0) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot write PNG '" + path.string() + "': " + msg);
    }
}

// ---------------------------------------------------------------- dispatch

Raster read_raster(const std::filesystem::path& path)
{
    std::ifstream probe(path, std::ios::binary);
    if (!probe) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::array<unsigned char, 8> head{};
    probe.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = probe.gcount();
    probe.close();
    if (got >= 8 && png_sig_cmp(head.data(), 0, 8) == 0) {
        return read_png(path);
    }
    if (got >= 2 && head[0] == 'P') {
        return read_pgm(path);
    }
    throw IoError("unsupported image format in '" + path.string() + "'");
}

bool wants_pgm(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    for (auto& c : ext) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return ext == ".pgm";
}

void write_raster(const std::filesystem::path& path, int width, int height, const std::uint8_t* data)
{
    if (wants_pgm(path)) {
        write_pgm(path, width, height, data);
    } else {
        write_png(path, width, height, data);
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& image_path)
{
    return std::filesystem::path(image_path.string() + ".meta");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_spacing_value(const std::string& text, const std::filesystem::path& file)
{
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !(v > 0.0) || !std::isfinite(v)) {
        throw IoError("invalid spacing '" + text + "' in '" + file.string() + "'");
    }
    return v;
}

} // namespace

std::optional<double> read_spacing_sidecar(const std::filesystem::path& image_path)
{
    const auto meta = sidecar_path(image_path);
    std::ifstream in(meta);
    if (!in) {
        return std::nullopt;
    }
    std::map<std::string, double> values;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("malformed line '" + line + "' in '" + meta.string() + "'");
        }
        const auto key = trim(line.substr(0, eq));
        if (key.rfind("spacing", 0) == 0) {
            values[key] = parse_spacing_value(trim(line.substr(eq + 1)), meta);
        }
    }
    const auto sx = values.find("spacing_x_mm_per_px");
    const auto sy = values.find("spacing_y_mm_per_px");
    if (sx != values.end() || sy != values.end()) {
        if (sx == values.end() || sy == values.end() || sx->second != sy->second) {
            throw InvalidArgument("anisotropic pixel spacing is not supported ('" + meta.string() + "')");
        }
    }
    if (const auto s = values.find("spacing_mm_per_px"); s != values.end()) {
        if (sx != values.end() && sx->second != s->second) {
            throw InvalidArgument("conflicting spacing entries in '" + meta.string() + "'");
        }
        return s->second;
    }
    if (sx != values.end()) {
        return sx->second;
    }
    return std::nullopt;
}

void write_spacing_sidecar(const std::filesystem::path& image_path, double spacing_mm)
{
    const auto meta = sidecar_path(image_path);
    std::ofstream out(meta);
    if (!out) {
        throw IoError("cannot write '" + meta.string() + "'");
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), spacing_mm);
    out << "spacing_mm_per_px = " << std::string(buf.data(), res.ptr) << '\n';
}

GrayImage load_image(const std::filesystem::path& path, std::optional<double> spacing_override)
{
    Raster r = read_raster(path);
    if (r.physical && r.physical->first != r.physical->second) {
        throw InvalidArgument("anisotropic pixel spacing is not supported ('" + path.string() + "')");
    }
    double spacing = 1.0;
    if (spacing_override) {
        spacing = *spacing_override;
    } else if (auto s = read_spacing_sidecar(path)) {
        spacing = *s;
    }
    return GrayImage(r.width, r.height, std::move(r.bytes), spacing);
}

void save_image(const std::filesystem::path& path, const GrayImage& image)
{
    write_raster(path, image.width(), image.height(), image.pixels().data());
}

BinaryMask load_mask(const std::filesystem::path& path)
{
    Raster r = read_raster(path);
    return BinaryMask(r.width, r.height, std::move(r.bytes));
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask)
{
    std::vector<std::uint8_t> bytes(mask.bits().begin(), mask.bits().end());
    for (auto& b : bytes) {
        b = b != 0 ? 255 : 0;
    }
    write_raster(path, mask.width(), mask.height(), bytes.data());
}

} // namespace uscut
