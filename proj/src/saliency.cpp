#include "contrex/saliency.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

namespace contrex {

SaliencyMap directional_diff(const Image& query, const Image& neighbor) {
    require_same_shape(query, neighbor, "directional_diff");
    SaliencyMap out(query.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(query[i] - neighbor[i]);
    return out;
}

SignedMap contrastive_raw(const ClassifierModel& c, const TraversalPath& path, const ContrastiveOptions& options) {
    if (path.size() < 2) {
        throw std::invalid_argument("contrastive_saliency: path has no points besides the query");
    }
    const Image& query = path.query_image();
    SignedMap acc(query.shape());
    const auto k = static_cast<double>(path.size() - 1);

    for (std::size_t j = 0; j < path.size(); ++j) {
        const bool is_query = j == path.query_index;
        if (is_query && !options.include_query_term) continue;
        const Gradient grad = input_gradient(c, path.images[j]);
        const SaliencyMap diff = directional_diff(query, path.images[j]);
        double denom = 1.0;
        if (options.normalize_by_alpha && !is_query) denom = std::abs(path.alphas[j]);
        for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += grad[p] * (diff[p] / denom);
    }
    for (double& v : acc.values()) v /= k;
    return acc;
}

SaliencyMap contrastive_saliency(const ClassifierModel& c, const TraversalPath& path,
                                 const ContrastiveOptions& options) {
    return mean_threshold(contrastive_raw(c, path, options));
}

template <class Tag>
SaliencyMap mean_threshold(const Raster<Tag>& raw) {
    SaliencyMap out(raw.shape());
    if (raw.size() == 0) return out;
    double sum = 0.0;
    for (double v : raw.values()) sum += std::abs(v);
    const double mu = sum / static_cast<double>(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double a = std::abs(raw[i]);
        out[i] = a >= mu ? a : 0.0;
    }
    return out;
}

template SaliencyMap mean_threshold(const Raster<SignedMapTag>&);
template SaliencyMap mean_threshold(const Raster<SaliencyTag>&);
template SaliencyMap mean_threshold(const Raster<GradientTag>&);

SignedMap integrated_gradients_signed(const ClassifierModel& c, const Image& x, const Image& baseline,
                                      std::size_t steps) {
    require_same_shape(x, baseline, "integrated_gradients");
    if (steps == 0) throw std::invalid_argument("integrated_gradients: steps must be >= 1");

    const std::size_t n = x.size();
    std::vector<double> sum(n, 0.0);
    std::vector<double> point(n);
    std::vector<double> grad(n);
    for (std::size_t t = 1; t <= steps; ++t) {
        const double frac = static_cast<double>(t) / static_cast<double>(steps);
        for (std::size_t i = 0; i < n; ++i) point[i] = baseline[i] + frac * (x[i] - baseline[i]);
        c.gradient(point, grad);
        for (std::size_t i = 0; i < n; ++i) sum[i] += grad[i];
    }
    SignedMap out(x.shape());
    const double inv = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - baseline[i]) * sum[i] * inv;
    return out;
}

SaliencyMap integrated_gradients(const ClassifierModel& c, const Image& x, const Image& baseline,
                                 std::size_t steps) {
    auto signed_map = integrated_gradients_signed(c, x, baseline, steps);
    SaliencyMap out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(signed_map[i]);
    return out;
}

SaliencyMap smoothgrad(const ClassifierModel& c, const Image& x, double noise_sd, std::size_t samples,
                       std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("smoothgrad: samples must be >= 1");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument(fmt::format("smoothgrad: noise_sd {} < 0", noise_sd));
    if (x.shape() != c.input_shape()) {
        throw std::invalid_argument(fmt::format("smoothgrad: image is {}x{} but classifier expects {}x{}",
                                                x.height(), x.width(), c.input_shape().height,
                                                c.input_shape().width));
    }

    // Noise-free samples are all identical; skip the averaging round-off.
    if (noise_sd == 0.0) return plain_gradient(c, x);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t n = x.size();
    std::vector<double> noisy(n);
    std::vector<double> grad(n);
    SaliencyMap out(x.shape());
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < n; ++i) noisy[i] = x[i] + noise_sd * noise(rng);
        c.gradient(noisy, grad);
        for (std::size_t i = 0; i < n; ++i) out[i] += std::abs(grad[i]);
    }
    const double inv = 1.0 / static_cast<double>(samples);
    for (double& v : out.values()) v *= inv;
    return out;
}

SaliencyMap plain_gradient(const ClassifierModel& c, const Image& x) {
    const Gradient g = input_gradient(c, x);
    SaliencyMap out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(g[i]);
    return out;
}

}  // namespace contrex
