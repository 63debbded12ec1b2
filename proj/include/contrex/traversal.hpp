#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "contrex/attributes.hpp"
#include "contrex/models.hpp"

namespace contrex {

/// α range and neighbor count for a latent traversal.
struct TraversalRange {
    double alpha_min = 0.0;
    double alpha_max = 30.0;
    std::size_t steps = 30;
};

/// Images generated along w_q − α·a, ordered by ascending α.
struct TraversalPath {
    AttributeVector attribute;
    std::vector<double> alphas;
    std::vector<Vector> latents;
    std::vector<Image> images;
    std::vector<double> scores;
    std::size_t query_index = 0;

    std::size_t size() const noexcept { return alphas.size(); }
    const Image& query_image() const { return images[query_index]; }
    double query_score() const { return scores[query_index]; }
};

/// The α grid: alpha_min + j·(alpha_max − alpha_min)/steps for j = 0..steps,
/// with α = 0 inserted in order when the grid misses it.
std::vector<double> alpha_grid(const TraversalRange& range);

TraversalPath build_path(const GeneratorModel& g, const ClassifierModel& c, const Vector& query_latent,
                         const AttributeVector& attribute, const TraversalRange& range);

struct ContrastivePair {
    std::optional<std::size_t> counterfactual;
    std::optional<std::size_t> semifactual;

    friend bool operator==(const ContrastivePair&, const ContrastivePair&) = default;
};

/// Counterfactual: highest score strictly below 0.5. Semifactual: lowest
/// score strictly above 0.5. Ties prefer smaller |α|, then lower index.
ContrastivePair retrieve_contrastives(std::span<const double> scores, std::span<const double> alphas);
ContrastivePair retrieve_contrastives(const TraversalPath& path);

}  // namespace contrex
