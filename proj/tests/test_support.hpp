// Shared fixtures and independent oracles for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "contrex/models.hpp"
#include "contrex/numerics.hpp"
#include "contrex/raster.hpp"
#include "contrex/synthetic.hpp"
#include "contrex/traversal.hpp"

namespace contrex::testing {

/// Copy of a raster's values; safe to iterate when the raster is a temporary.
template <class Tag>
std::vector<double> pixels(const Raster<Tag>& r) {
    return r.storage();
}

inline Image random_image(Shape shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(shape.size());
    for (double& v : px) v = u(rng);
    return Image(shape, std::move(px));
}

inline Matrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = g(rng);
    return m;
}

/// n×k matrix with orthonormal columns (Gram-Schmidt on Gaussian draws).
inline Matrix random_orthonormal(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vector> cols;
    while (cols.size() < k) {
        std::vector<double> v(n);
        for (double& x : v) x = g(rng);
        Vector c(std::move(v));
        for (const auto& prev : cols) c = c - dot(c, prev) * prev;
        if (norm(c) > 1e-6) cols.push_back(normalized(c));
    }
    return Matrix::from_columns(cols);
}

inline ClassifierModel random_logistic(Shape shape, std::mt19937_64& rng, double scale = 0.05) {
    std::normal_distribution<double> g(0.0, scale);
    LogisticParams p;
    p.weights.resize(shape.size());
    for (double& w : p.weights) w = g(rng);
    p.bias = g(rng);
    return {shape, std::move(p)};
}

inline ClassifierModel random_mlp(Shape shape, std::size_t hidden, std::mt19937_64& rng, double scale = 0.05) {
    std::normal_distribution<double> g(0.0, scale);
    MlpParams p;
    p.hidden = hidden;
    p.w1.resize(hidden * shape.size());
    for (double& w : p.w1) w = g(rng);
    p.b1.resize(hidden);
    for (double& b : p.b1) b = g(rng);
    std::normal_distribution<double> out_weight(0.0, 1.0);
    p.w2.resize(hidden);
    for (double& w : p.w2) w = out_weight(rng);
    p.b2 = g(rng);
    return {shape, std::move(p)};
}

/// Central finite differences of classify() with step h.
inline std::vector<double> finite_difference_gradient(const ClassifierModel& c, const Image& x, double h = 1e-3) {
    std::vector<double> out(x.size());
    Image probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + h;
        const double up = classify(c, probe);
        probe[i] = orig - h;
        const double down = classify(c, probe);
        probe[i] = orig;
        out[i] = (up - down) / (2.0 * h);
    }
    return out;
}

struct GradientCheck {
    double max_relative_error = 0.0;
    double max_absolute_error_small = 0.0;
    bool pass(double rel_tol = 1e-4, double abs_tol = 1e-6) const {
        return max_relative_error <= rel_tol && max_absolute_error_small <= abs_tol;
    }
};

/// Entries with |fd| < 1e-8 are compared absolutely, the rest relatively.
inline GradientCheck compare_gradients(std::span<const double> analytic, std::span<const double> fd) {
    GradientCheck out;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        const double diff = std::abs(analytic[i] - fd[i]);
        if (std::abs(fd[i]) < 1e-8) {
            out.max_absolute_error_small = std::max(out.max_absolute_error_small, diff);
        } else {
            out.max_relative_error = std::max(out.max_relative_error, diff / std::abs(fd[i]));
        }
    }
    return out;
}

/// Exhaustive scan: for each side, collect every qualifying index and pick
/// the best by (score, |alpha|, index) lexicographically.
inline ContrastivePair brute_force_contrastives(std::span<const double> scores, std::span<const double> alphas) {
    ContrastivePair out;
    std::vector<std::size_t> below;
    std::vector<std::size_t> above;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (scores[j] < 0.5) below.push_back(j);
        if (scores[j] > 0.5) above.push_back(j);
    }
    auto key_cf = [&](std::size_t j) { return std::make_tuple(-scores[j], std::abs(alphas[j]), j); };
    auto key_sf = [&](std::size_t j) { return std::make_tuple(scores[j], std::abs(alphas[j]), j); };
    if (!below.empty()) {
        out.counterfactual = *std::min_element(below.begin(), below.end(),
                                               [&](auto a, auto b) { return key_cf(a) < key_cf(b); });
    }
    if (!above.empty()) {
        out.semifactual = *std::min_element(above.begin(), above.end(),
                                            [&](auto a, auto b) { return key_sf(a) < key_sf(b); });
    }
    return out;
}

/// Trained fixture world shared by the fixture-level tests.
struct FixtureWorld {
    Geometry geometry;
    PlantedGenerator planted;
    ClassifierModel classifier;
    double holdout_accuracy;
};

inline FixtureWorld make_fixture_world(std::uint64_t seed = 7) {
    Geometry geo;
    auto data = make_lesion_dataset(500, geo.shape(), seed);
    LabeledDataset train;
    train.images.assign(data.images.begin(), data.images.begin() + 400);
    train.labels.assign(data.labels.begin(), data.labels.begin() + 400);
    TrainOptions opts;
    opts.seed = seed + 1;
    auto result = train_classifier(train, opts);
    const double acc = accuracy(result.model, std::span<const Image>(data.images).subspan(400),
                                std::span<const int>(data.labels).subspan(400));
    return {geo, make_planted_generator(geo, 0, seed + 2), std::move(result.model), acc};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("contrex_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace contrex::testing
