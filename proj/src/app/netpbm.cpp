#include "contrex/app/netpbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace contrex::app {
namespace {

unsigned char quantize(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

double max_of(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

void require_size(Shape shape, std::size_t n, const char* what) {
    if (shape.size() != n) {
        throw std::invalid_argument(
            fmt::format("{}: {} values for a {}x{} image", what, n, shape.height, shape.width));
    }
}

}  // namespace

std::string encode_pgm(Shape shape, std::span<const double> values, bool max_normalize) {
    require_size(shape, values.size(), "encode_pgm");
    const double peak = max_normalize ? max_of(values) : 0.0;
    const double scale = peak > 0.0 ? 1.0 / peak : 1.0;
    std::string out = fmt::format("P5\n{} {}\n255\n", shape.width, shape.height);
    out.reserve(out.size() + values.size());
    for (double v : values) out.push_back(static_cast<char>(quantize(v * scale)));
    return out;
}

void write_pgm(const std::filesystem::path& file, Shape shape, std::span<const double> values, bool max_normalize) {
    write_file_atomic(file, encode_pgm(shape, values, max_normalize));
}

Image decode_pgm(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string magic;
    std::size_t width = 0;
    std::size_t height = 0;
    int maxval = 0;
    in >> magic;
    // Skip comment lines between header tokens.
    auto next = [&](auto& target) {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
        in >> target;
    };
    next(width);
    next(height);
    next(maxval);
    if (magic != "P5" || !in || width == 0 || height == 0 || maxval <= 0 || maxval > 255) {
        throw std::runtime_error("not an 8-bit binary PGM (P5) image");
    }
    in.get();
    std::vector<double> px(width * height);
    for (double& v : px) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw std::runtime_error("truncated PGM pixel data");
        v = static_cast<double>(static_cast<unsigned char>(c)) / static_cast<double>(maxval);
    }
    return Image({height, width}, std::move(px));
}

Image read_pgm(const std::filesystem::path& file) { return decode_pgm(read_file(file)); }

std::string encode_ppm(Shape shape, std::span<const double> red, std::span<const double> green,
                       std::span<const double> blue) {
    require_size(shape, red.size(), "encode_ppm");
    require_size(shape, green.size(), "encode_ppm");
    require_size(shape, blue.size(), "encode_ppm");
    std::string out = fmt::format("P6\n{} {}\n255\n", shape.width, shape.height);
    out.reserve(out.size() + 3 * red.size());
    for (std::size_t i = 0; i < red.size(); ++i) {
        out.push_back(static_cast<char>(quantize(red[i])));
        out.push_back(static_cast<char>(quantize(green[i])));
        out.push_back(static_cast<char>(quantize(blue[i])));
    }
    return out;
}

void write_ppm(const std::filesystem::path& file, Shape shape, std::span<const double> red,
               std::span<const double> green, std::span<const double> blue) {
    write_file_atomic(file, encode_ppm(shape, red, green, blue));
}

void write_overlay(const std::filesystem::path& file, const Image& image, const SaliencyMap& saliency) {
    require_same_shape(image, saliency, "write_overlay");
    const double peak = max_of(saliency.values());
    const std::size_t n = image.size();
    std::vector<double> r(n), g(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = peak > 0.0 ? saliency[i] / peak : 0.0;
        const double gray = image[i];
        r[i] = (1.0 - a) * gray + a;
        g[i] = (1.0 - a) * gray;
        b[i] = (1.0 - a) * gray;
    }
    write_ppm(file, image.shape(), r, g, b);
}

void write_file_atomic(const std::filesystem::path& file, const std::string& bytes) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", file.string()));
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", file.string()));
    }
    std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", file.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace contrex::app
