#include "contrex/traversal.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace contrex {

std::vector<double> alpha_grid(const TraversalRange& range) {
    if (!(range.alpha_min < range.alpha_max)) {
        throw std::invalid_argument(
            fmt::format("traversal range needs A < B, got A={} B={}", range.alpha_min, range.alpha_max));
    }
    if (range.steps < 2) throw std::invalid_argument(fmt::format("traversal needs k >= 2, got {}", range.steps));

    const double step = (range.alpha_max - range.alpha_min) / static_cast<double>(range.steps);
    std::vector<double> alphas;
    alphas.reserve(range.steps + 2);
    for (std::size_t j = 0; j <= range.steps; ++j) {
        alphas.push_back(range.alpha_min + static_cast<double>(j) * step);
    }
    if (std::find(alphas.begin(), alphas.end(), 0.0) == alphas.end()) {
        alphas.insert(std::upper_bound(alphas.begin(), alphas.end(), 0.0), 0.0);
    }
    return alphas;
}

TraversalPath build_path(const GeneratorModel& g, const ClassifierModel& c, const Vector& query_latent,
                         const AttributeVector& attribute, const TraversalRange& range) {
    if (query_latent.dim() != g.latent_dim()) {
        throw std::invalid_argument(fmt::format("build_path: query latent has dim {} but generator expects {}",
                                                query_latent.dim(), g.latent_dim()));
    }
    if (attribute.dim() != g.latent_dim()) {
        throw std::invalid_argument(fmt::format("build_path: attribute has dim {} but generator expects {}",
                                                attribute.dim(), g.latent_dim()));
    }
    auto alphas = alpha_grid(range);
    const auto query_pos = static_cast<std::size_t>(
        std::find(alphas.begin(), alphas.end(), 0.0) - alphas.begin());

    TraversalPath path{attribute, {}, {}, {}, {}, query_pos};
    const auto& a = attribute.direction();
    for (double alpha : alphas) {
        std::vector<double> w(query_latent.dim());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = query_latent[i] - alpha * a[i];
        Vector latent(std::move(w));
        Image img = generate(g, latent);
        path.scores.push_back(classify(c, img));
        path.latents.push_back(std::move(latent));
        path.images.push_back(std::move(img));
    }
    path.alphas = std::move(alphas);
    return path;
}

ContrastivePair retrieve_contrastives(std::span<const double> scores, std::span<const double> alphas) {
    if (scores.size() != alphas.size()) {
        throw std::invalid_argument(fmt::format("retrieve_contrastives: {} scores but {} alphas", scores.size(),
                                                alphas.size()));
    }
    ContrastivePair out;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        const double s = scores[j];
        if (s < 0.5) {
            if (!out.counterfactual) {
                out.counterfactual = j;
                continue;
            }
            const std::size_t cur = *out.counterfactual;
            if (s > scores[cur] || (s == scores[cur] && std::abs(alphas[j]) < std::abs(alphas[cur]))) {
                out.counterfactual = j;
            }
        } else if (s > 0.5) {
            if (!out.semifactual) {
                out.semifactual = j;
                continue;
            }
            const std::size_t cur = *out.semifactual;
            if (s < scores[cur] || (s == scores[cur] && std::abs(alphas[j]) < std::abs(alphas[cur]))) {
                out.semifactual = j;
            }
        }
    }
    return out;
}

ContrastivePair retrieve_contrastives(const TraversalPath& path) {
    return retrieve_contrastives(path.scores, path.alphas);
}

}  // namespace contrex
