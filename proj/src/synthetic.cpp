#include "contrex/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace contrex {
namespace {

double scale_of(Shape shape) {
    return static_cast<double>(std::min(shape.height, shape.width)) / 64.0;
}

double distance(double r, double c, const LesionSpec& lesion) {
    return std::hypot(r - lesion.center_row, c - lesion.center_col);
}

struct CosinePattern {
    int freq_x;
    int freq_y;
    double phase_x;
    double phase_y;

    double at(std::size_t r, std::size_t c, Shape shape) const {
        const double x = std::numbers::pi * freq_x * (static_cast<double>(c) + 0.5) / static_cast<double>(shape.width);
        const double y = std::numbers::pi * freq_y * (static_cast<double>(r) + 0.5) / static_cast<double>(shape.height);
        return std::cos(x + phase_x) * std::cos(y + phase_y);
    }
};

CosinePattern random_pattern(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> freq(0, 2);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    CosinePattern p{freq(rng), freq(rng), 0.0, 0.0};
    if (p.freq_x == 0 && p.freq_y == 0) p.freq_x = 1;
    p.phase_x = phase(rng);
    p.phase_y = phase(rng);
    return p;
}

}  // namespace

void validate_lesion(Shape shape, const LesionSpec& lesion, double background) {
    if (!(lesion.radius > 0.0)) throw std::invalid_argument("lesion radius must be positive");
    const double max_row = static_cast<double>(shape.height) - 1.0;
    const double max_col = static_cast<double>(shape.width) - 1.0;
    if (lesion.center_row - lesion.radius < 0.0 || lesion.center_row + lesion.radius > max_row ||
        lesion.center_col - lesion.radius < 0.0 || lesion.center_col + lesion.radius > max_col) {
        throw std::invalid_argument(fmt::format("lesion disk (center {},{} radius {}) does not fit in a {}x{} image",
                                                lesion.center_row, lesion.center_col, lesion.radius, shape.height,
                                                shape.width));
    }
    if (lesion.intensity < background || lesion.intensity > 1.0) {
        throw std::invalid_argument(
            fmt::format("lesion intensity {} must lie in [background {}, 1]", lesion.intensity, background));
    }
    if (lesion.halo_multiplier < 1.0) throw std::invalid_argument("lesion halo multiplier must be >= 1");
}

SignedMap lesion_template(Shape shape, const LesionSpec& lesion, double background, double halo_strength) {
    validate_lesion(shape, lesion, background);
    const double amplitude = lesion.intensity - background;
    const double halo_outer = lesion.radius * lesion.halo_multiplier;
    const double halo_width = halo_outer - lesion.radius;
    SignedMap out(shape);
    for (std::size_t r = 0; r < shape.height; ++r) {
        for (std::size_t c = 0; c < shape.width; ++c) {
            const double d = distance(static_cast<double>(r), static_cast<double>(c), lesion);
            if (d <= lesion.radius) {
                out.at(r, c) = amplitude;
            } else if (halo_width > 0.0 && d < halo_outer) {
                out.at(r, c) = amplitude * halo_strength * (halo_outer - d) / halo_width;
            }
        }
    }
    return out;
}

Mask lesion_mask(Shape shape, const LesionSpec& lesion) {
    Mask out(shape);
    for (std::size_t r = 0; r < shape.height; ++r)
        for (std::size_t c = 0; c < shape.width; ++c)
            if (distance(static_cast<double>(r), static_cast<double>(c), lesion) <= lesion.radius) out.at(r, c) = 1.0;
    return out;
}

LabeledDataset make_lesion_dataset(std::size_t n, Shape shape, std::uint64_t seed, const FixtureStyle& style) {
    if (n < 2) throw std::invalid_argument(fmt::format("make_lesion_dataset: need n >= 2, got {}", n));
    const double s = scale_of(shape);
    const double mid_row = (static_cast<double>(shape.height) - 1.0) / 2.0;
    const double mid_col = (static_cast<double>(shape.width) - 1.0) / 2.0;
    // Worst case placement must fit before anything is drawn.
    validate_lesion(shape,
                    {mid_row + style.center_jitter * s, mid_col + style.center_jitter * s, style.radius_max * s,
                     style.intensity_max, style.halo_multiplier},
                    style.background);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, style.noise_sd);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(style.radius_min * s, style.radius_max * s);
    std::uniform_real_distribution<double> intensity(style.intensity_min, style.intensity_max);

    LabeledDataset data;
    data.images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i % 2 == 0;
        std::vector<double> px(shape.size(), style.background);

        for (int k = 0; k < 3; ++k) {
            const auto pattern = random_pattern(rng);
            const double coeff = unit(rng) * style.smooth_amplitude / 3.0;
            for (std::size_t r = 0; r < shape.height; ++r)
                for (std::size_t c = 0; c < shape.width; ++c) px[r * shape.width + c] += coeff * pattern.at(r, c, shape);
        }

        Mask mask(shape);
        if (positive) {
            LesionSpec lesion{mid_row + style.center_jitter * s * unit(rng), mid_col + style.center_jitter * s * unit(rng),
                              radius(rng), intensity(rng), style.halo_multiplier};
            const auto tmpl = lesion_template(shape, lesion, style.background, style.halo_strength);
            for (std::size_t p = 0; p < px.size(); ++p) px[p] += tmpl[p];
            mask = lesion_mask(shape, lesion);
        }
        for (double& v : px) v = std::clamp(v + noise(rng), 0.0, 1.0);

        data.images.emplace_back(shape, std::move(px));
        data.labels.push_back(positive ? 1 : 0);
        data.masks.push_back(std::move(mask));
    }
    return data;
}

PlantedGenerator make_planted_generator(const Geometry& geometry, std::size_t lesion_axis, std::uint64_t seed,
                                        const FixtureStyle& style) {
    const std::size_t d = geometry.latent_dim;
    if (lesion_axis >= d) {
        throw std::invalid_argument(
            fmt::format("make_planted_generator: lesion axis {} out of range for latent dim {}", lesion_axis, d));
    }
    const Shape shape = geometry.shape();
    const double s = scale_of(shape);
    const LesionSpec lesion{(static_cast<double>(shape.height) - 1.0) / 2.0,
                            (static_cast<double>(shape.width) - 1.0) / 2.0, 6.0 * s, 0.85, style.halo_multiplier};
    const auto tmpl = lesion_template(shape, lesion, style.background, style.halo_strength);

    const std::size_t npx = shape.size();
    std::vector<std::vector<double>> columns(d);
    columns[lesion_axis].resize(npx);
    for (std::size_t p = 0; p < npx; ++p) columns[lesion_axis][p] = tmpl[p] / kFullLesionCoordinate;

    auto dot_cols = [npx](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t p = 0; p < npx; ++p) acc += a[p] * b[p];
        return acc;
    };
    const double lesion_norm = std::sqrt(dot_cols(columns[lesion_axis], columns[lesion_axis]));

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> done{lesion_axis};
    std::size_t background_rank = 0;
    for (std::size_t k = 0; k < d; ++k) {
        if (k == lesion_axis) continue;
        auto& col = columns[k];
        double col_norm = 0.0;
        // Redraw if a pattern is (numerically) inside the span of the previous ones.
        for (int attempt = 0; attempt < 64 && col_norm < 1e-6; ++attempt) {
            const auto pattern = random_pattern(rng);
            col.assign(npx, 0.0);
            for (std::size_t r = 0; r < shape.height; ++r)
                for (std::size_t c = 0; c < shape.width; ++c) col[r * shape.width + c] = pattern.at(r, c, shape);
            for (std::size_t j : done) {
                const double proj = dot_cols(col, columns[j]) / dot_cols(columns[j], columns[j]);
                for (std::size_t p = 0; p < npx; ++p) col[p] -= proj * columns[j][p];
            }
            col_norm = std::sqrt(dot_cols(col, col)) / std::sqrt(static_cast<double>(npx));
        }
        if (col_norm < 1e-6) throw std::runtime_error("make_planted_generator: could not draw independent patterns");
        const double target = lesion_norm * (0.45 - 0.03 * static_cast<double>(background_rank++));
        const double scale = target / std::sqrt(dot_cols(col, col));
        for (double& v : col) v *= scale;
        done.push_back(k);
    }

    std::vector<double> basis(npx * d);
    for (std::size_t p = 0; p < npx; ++p)
        for (std::size_t k = 0; k < d; ++k) basis[p * d + k] = columns[k][p];

    GeneratorModel generator(shape, Matrix(npx, d, std::move(basis)), Vector(npx, style.background));
    return {std::move(generator), AttributeVector(Vector::unit(d, lesion_axis), 0, lesion_norm * lesion_norm),
            lesion_axis, lesion, lesion_mask(shape, lesion), kFullLesionCoordinate};
}

std::vector<Vector> sample_fixture_latents(std::size_t latent_dim, std::size_t lesion_axis, std::size_t n,
                                           double lesion_min, double lesion_max, std::uint64_t seed,
                                           double background_sd) {
    if (lesion_axis >= latent_dim) {
        throw std::invalid_argument(
            fmt::format("sample_fixture_latents: lesion axis {} out of range for dim {}", lesion_axis, latent_dim));
    }
    if (lesion_min > lesion_max) throw std::invalid_argument("sample_fixture_latents: lesion_min > lesion_max");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lesion(lesion_min, lesion_max);
    std::normal_distribution<double> other(0.0, background_sd);
    std::vector<Vector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(latent_dim);
        for (std::size_t k = 0; k < latent_dim; ++k) w[k] = k == lesion_axis ? lesion(rng) : other(rng);
        out.emplace_back(std::move(w));
    }
    return out;
}

}  // namespace contrex
