#include "contrex/attributes.hpp"

#include <cmath>

#include <fmt/format.h>

namespace contrex {

AttributeVector::AttributeVector(Vector direction, std::size_t rank, double eigenvalue)
    : direction_(std::move(direction)), rank_(rank), eigenvalue_(eigenvalue) {
    const double n = norm(direction_);
    if (std::abs(n - 1.0) > 1e-10) {
        throw std::invalid_argument(fmt::format("attribute direction must be unit norm, got norm {}", n));
    }
    if (!(eigenvalue_ >= 0.0)) {
        throw std::invalid_argument(fmt::format("attribute eigenvalue must be nonnegative, got {}", eigenvalue_));
    }
}

AttributeVector AttributeVector::flipped() const { return {-1.0 * direction_, rank_, eigenvalue_}; }

std::vector<AttributeVector> sefa_directions(const Matrix& weights, std::size_t n) {
    if (n > weights.cols()) {
        throw std::invalid_argument(
            fmt::format("sefa_directions: asked for {} directions but weights have {} columns", n, weights.cols()));
    }
    const auto eig = sym_eigen(gram(weights));
    // AᵀA is PSD; roundoff can leave the null-space eigenvalues a hair below zero.
    const double floor = 1e-12 * std::max(1.0, std::abs(eig.values[0]));

    std::vector<AttributeVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lambda = eig.values[i];
        if (lambda < 0.0 && lambda > -floor) lambda = 0.0;
        out.emplace_back(normalized(eig.vectors.column(i)), i, lambda);
    }
    return out;
}

Vector seed_contrast(std::span<const Vector> seed_latents, std::span<const Vector> background_latents) {
    if (seed_latents.empty()) throw std::invalid_argument("select_attribute: no seed latents");
    if (background_latents.empty()) throw std::invalid_argument("select_attribute: no background latents");
    Vector diff = mean_of(seed_latents) - mean_of(background_latents);
    if (norm(diff) == 0.0) throw std::invalid_argument("seeds indistinguishable from background");
    return diff;
}

AttributeVector select_attribute(std::span<const AttributeVector> directions, std::span<const Vector> seed_latents,
                                 std::span<const Vector> background_latents) {
    if (directions.empty()) throw std::invalid_argument("select_attribute: no candidate directions");
    const Vector diff = seed_contrast(seed_latents, background_latents);

    std::size_t best = 0;
    double best_cos = -1.0;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const double c = std::abs(cosine(directions[i].direction(), diff));
        const bool better = c > best_cos ||
                            (c == best_cos && directions[i].rank() < directions[best].rank());
        if (better) {
            best = i;
            best_cos = c;
        }
    }
    const auto& chosen = directions[best];
    return dot(chosen.direction(), diff) < 0.0 ? chosen.flipped() : chosen;
}

}  // namespace contrex
