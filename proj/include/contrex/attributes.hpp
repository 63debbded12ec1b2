#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "contrex/numerics.hpp"

namespace contrex {

/// Unit-norm latent direction for one visual attribute.
class AttributeVector {
public:
    /// Throws unless ‖direction‖ = 1 within 1e-10 and eigenvalue ≥ 0.
    AttributeVector(Vector direction, std::size_t rank, double eigenvalue);

    const Vector& direction() const noexcept { return direction_; }
    std::size_t rank() const noexcept { return rank_; }
    double eigenvalue() const noexcept { return eigenvalue_; }
    std::size_t dim() const noexcept { return direction_.dim(); }

    AttributeVector flipped() const;

private:
    Vector direction_;
    std::size_t rank_;
    double eigenvalue_;
};

/// Top-n unit eigenvectors of AᵀA (descending eigenvalue, sign-canonical).
std::vector<AttributeVector> sefa_directions(const Matrix& weights, std::size_t n);

/// Picks the direction most aligned (|cos|) with mean(seeds) − mean(background),
/// ties going to the lower rank, and orients it so that +a points toward the seeds.
AttributeVector select_attribute(std::span<const AttributeVector> directions, std::span<const Vector> seed_latents,
                                 std::span<const Vector> background_latents);

/// mean(seeds) − mean(background); throws when it vanishes.
Vector seed_contrast(std::span<const Vector> seed_latents, std::span<const Vector> background_latents);

}  // namespace contrex
