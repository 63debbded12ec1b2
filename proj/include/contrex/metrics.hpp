#pragma once

#include <string>
#include <vector>

#include "contrex/models.hpp"
#include "contrex/raster.hpp"

namespace contrex {

struct SicPoint {
    double fraction;
    double normalized_softmax;
};

/// Normalized softmax vs. fraction of most-salient pixels revealed.
struct SicCurve {
    std::vector<SicPoint> points;
    double auc = 0.0;
};

struct SicOptions {
    double blur_sigma = 8.0;
    std::vector<double> fractions = default_fractions();

    static std::vector<double> default_fractions();
};

/// Separable Gaussian blur truncated at 3σ, edge pixels replicated.
Image gaussian_blur(const Image& x, double sigma);

/// Pixel indices by descending saliency, ties in row-major order.
std::vector<std::size_t> saliency_order(const SaliencyMap& s);

/// Trapezoid rule over the curve points.
double trapezoid_auc(const std::vector<SicPoint>& points);

/// Evaluates SIC curves for one image; the blurred base and its score are
/// computed once and shared across saliency maps.
class SicEvaluator {
public:
    /// Throws std::domain_error("query uninformative under blur") when the
    /// blurred base scores the same as the original.
    SicEvaluator(const ClassifierModel& c, const Image& x, SicOptions options = {});

    SicCurve curve(const SaliencyMap& s) const;

    const Image& base() const noexcept { return base_; }
    double original_score() const noexcept { return original_score_; }
    double base_score() const noexcept { return base_score_; }

private:
    const ClassifierModel* classifier_;
    Image image_;
    Image base_;
    SicOptions options_;
    double original_score_;
    double base_score_;
};

SicCurve sic_curve(const ClassifierModel& c, const Image& x, const SaliencyMap& s, const SicOptions& options = {});

struct NamedMap {
    std::string name;
    SaliencyMap map;
};

struct MethodScore {
    std::string name;
    double auc;
    SicCurve curve;
};

/// One SIC curve + AUC per named map for a single query.
std::vector<MethodScore> compare_methods(const ClassifierModel& c, const Image& x, const std::vector<NamedMap>& maps,
                                         const SicOptions& options = {});

struct MethodSummary {
    std::string name;
    double median_auc;
    std::vector<SicPoint> median_curve;
    std::size_t queries;
};

/// Aggregates per-query results (outer index = query, inner = method, same
/// method order and fractions for every query) into pointwise median curves
/// and median AUCs.
std::vector<MethodSummary> summarize_methods(const std::vector<std::vector<MethodScore>>& per_query);

double median(std::vector<double> values);

}  // namespace contrex
