#include "contrex/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace contrex {

std::vector<double> SicOptions::default_fractions() {
    return {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
}

Image gaussian_blur(const Image& x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument(fmt::format("gaussian_blur: sigma must be > 0, got {}", sigma));
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (double& v : kernel) v /= total;

    const auto h = static_cast<long>(x.height());
    const auto w = static_cast<long>(x.width());
    std::vector<double> tmp(x.size());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long k = -radius; k <= radius; ++k) {
                const long cc = std::clamp(c + k, 0L, w - 1);
                acc += kernel[static_cast<std::size_t>(k + radius)] * x.at(r, cc);
            }
            tmp[static_cast<std::size_t>(r * w + c)] = acc;
        }
    }
    std::vector<double> out(x.size());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double acc = 0.0;
            for (long k = -radius; k <= radius; ++k) {
                const long rr = std::clamp(r + k, 0L, h - 1);
                acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(rr * w + c)];
            }
            out[static_cast<std::size_t>(r * w + c)] = std::clamp(acc, 0.0, 1.0);
        }
    }
    return Image(x.shape(), std::move(out));
}

std::vector<std::size_t> saliency_order(const SaliencyMap& s) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    return order;
}

double trapezoid_auc(const std::vector<SicPoint>& points) {
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double dx = points[i].fraction - points[i - 1].fraction;
        area += 0.5 * dx * (points[i].normalized_softmax + points[i - 1].normalized_softmax);
    }
    return area;
}

namespace {

void validate_fractions(const std::vector<double>& fractions) {
    if (fractions.size() < 2 || fractions.front() != 0.0 || fractions.back() != 1.0) {
        throw std::invalid_argument("SIC fractions must start at 0 and end at 1");
    }
    for (std::size_t i = 1; i < fractions.size(); ++i) {
        if (!(fractions[i] > fractions[i - 1])) {
            throw std::invalid_argument("SIC fractions must be strictly ascending");
        }
    }
}

}  // namespace

SicEvaluator::SicEvaluator(const ClassifierModel& c, const Image& x, SicOptions options)
    : classifier_(&c), image_(x), base_(gaussian_blur(x, options.blur_sigma)), options_(std::move(options)) {
    validate_fractions(options_.fractions);
    original_score_ = classify(c, image_);
    base_score_ = classify(c, base_);
    if (std::abs(original_score_ - base_score_) <= 1e-12) {
        throw std::domain_error("query uninformative under blur");
    }
}

SicCurve SicEvaluator::curve(const SaliencyMap& s) const {
    require_same_shape(image_, s, "sic_curve");
    const auto order = saliency_order(s);
    const std::size_t total = image_.size();

    SicCurve out;
    Image revealed = base_;
    std::size_t shown = 0;
    for (double f : options_.fractions) {
        const auto target = std::min(total, static_cast<std::size_t>(std::ceil(f * static_cast<double>(total))));
        for (; shown < target; ++shown) revealed[order[shown]] = image_[order[shown]];
        const double score = classify(*classifier_, revealed);
        const double norm = (score - base_score_) / (original_score_ - base_score_);
        out.points.push_back({f, std::clamp(norm, 0.0, 1.0)});
    }
    out.auc = trapezoid_auc(out.points);
    return out;
}

SicCurve sic_curve(const ClassifierModel& c, const Image& x, const SaliencyMap& s, const SicOptions& options) {
    return SicEvaluator(c, x, options).curve(s);
}

std::vector<MethodScore> compare_methods(const ClassifierModel& c, const Image& x, const std::vector<NamedMap>& maps,
                                         const SicOptions& options) {
    if (maps.empty()) throw std::invalid_argument("compare_methods: no saliency maps given");
    for (const auto& m : maps) require_same_shape(maps.front().map, m.map, "compare_methods");
    const SicEvaluator eval(c, x, options);
    std::vector<MethodScore> out;
    out.reserve(maps.size());
    for (const auto& m : maps) {
        auto curve = eval.curve(m.map);
        const double auc = curve.auc;
        out.push_back({m.name, auc, std::move(curve)});
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<MethodSummary> summarize_methods(const std::vector<std::vector<MethodScore>>& per_query) {
    if (per_query.empty()) throw std::invalid_argument("summarize_methods: no queries");
    const auto& first = per_query.front();
    std::vector<MethodSummary> out;
    for (std::size_t m = 0; m < first.size(); ++m) {
        std::vector<double> aucs;
        const std::size_t npoints = first[m].curve.points.size();
        std::vector<std::vector<double>> columns(npoints);
        for (const auto& q : per_query) {
            if (q.size() != first.size() || q[m].name != first[m].name) {
                throw std::invalid_argument("summarize_methods: queries list different methods");
            }
            if (q[m].curve.points.size() != npoints) {
                throw std::invalid_argument("summarize_methods: curves use different fractions");
            }
            aucs.push_back(q[m].auc);
            for (std::size_t p = 0; p < npoints; ++p) columns[p].push_back(q[m].curve.points[p].normalized_softmax);
        }
        MethodSummary s{first[m].name, median(aucs), {}, per_query.size()};
        for (std::size_t p = 0; p < npoints; ++p) {
            s.median_curve.push_back({first[m].curve.points[p].fraction, median(columns[p])});
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace contrex
