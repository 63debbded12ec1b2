#pragma once

#include <cstddef>
#include <cstdint>

#include "contrex/models.hpp"
#include "contrex/raster.hpp"
#include "contrex/traversal.hpp"

namespace contrex {

/// Per-pixel |q − n|.
SaliencyMap directional_diff(const Image& query, const Image& neighbor);

struct ContrastiveOptions {
    /// Divide each neighbor's difference map by |α_j| (the α step) instead of 1.
    bool normalize_by_alpha = false;
    /// Add the query's own term to the sum. It is annihilated by Diff(q,q) = 0,
    /// and kept only so that property can be checked.
    bool include_query_term = false;
};

/// Σ_j input_gradient(c, image_j) ⊙ Diff(query, image_j) / k over the k
/// non-query path points, accumulated in ascending-α order.
SignedMap contrastive_raw(const ClassifierModel& c, const TraversalPath& path,
                          const ContrastiveOptions& options = {});

/// Directional-derivative-weighted saliency: mean_threshold(|contrastive_raw|).
SaliencyMap contrastive_saliency(const ClassifierModel& c, const TraversalPath& path,
                                 const ContrastiveOptions& options = {});

/// Keeps |v| where |v| ≥ mean(|v|), zero elsewhere.
template <class Tag>
SaliencyMap mean_threshold(const Raster<Tag>& raw);

/// Signed attributions (x − b) ⊙ mean_t ∇f(b + (t/steps)(x − b)), t = 1..steps.
SignedMap integrated_gradients_signed(const ClassifierModel& c, const Image& x, const Image& baseline,
                                      std::size_t steps);
/// |integrated_gradients_signed|, unthresholded.
SaliencyMap integrated_gradients(const ClassifierModel& c, const Image& x, const Image& baseline,
                                 std::size_t steps);

/// Mean of |∇f(x + N(0, noise_sd²))| over `samples` draws seeded by `seed`.
SaliencyMap smoothgrad(const ClassifierModel& c, const Image& x, double noise_sd, std::size_t samples,
                       std::uint64_t seed);

/// |∇f(x)|.
SaliencyMap plain_gradient(const ClassifierModel& c, const Image& x);

}  // namespace contrex
