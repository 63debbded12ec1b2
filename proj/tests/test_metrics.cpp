#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "contrex/metrics.hpp"
#include "test_support.hpp"

using namespace contrex;

namespace {

const Shape kShape{16, 16};

/// Logistic classifier that looks at the mean of the central 4x4 patch.
ClassifierModel center_classifier() {
    std::vector<double> w(kShape.size(), 0.0);
    for (std::size_t r = 6; r < 10; ++r)
        for (std::size_t c = 6; c < 10; ++c) w[r * 16 + c] = 1.0;
    return {kShape, LogisticParams{std::move(w), -6.0}};
}

Image spot_image() {
    Image x(kShape, 0.1);
    for (std::size_t r = 6; r < 10; ++r)
        for (std::size_t c = 6; c < 10; ++c) x.at(r, c) = 1.0;
    return x;
}

}  // namespace

TEST_CASE("gaussian_blur: constant images unchanged, mass preserved in interior") {
    const Image flat(kShape, 0.4);
    const auto blurred = gaussian_blur(flat, 3.0);
    for (double v : blurred.values()) CHECK(v == doctest::Approx(0.4));
    CHECK(gaussian_blur(spot_image(), 2.0).at(7, 7) < 1.0);
    CHECK_THROWS_AS(gaussian_blur(flat, 0.0), std::invalid_argument);
}

TEST_CASE("saliency_order: descending with row-major ties") {
    const SaliencyMap s({2, 2}, {0.5, 1.0, 0.5, 0.0});
    CHECK(saliency_order(s) == std::vector<std::size_t>{1, 0, 2, 3});
}

TEST_CASE("trapezoid_auc") {
    CHECK(trapezoid_auc({{0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}}) == doctest::Approx(1.0));
    CHECK(trapezoid_auc({{0.0, 0.0}, {1.0, 1.0}}) == doctest::Approx(0.5));
    CHECK(trapezoid_auc({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}}) == doctest::Approx(0.75));
}

TEST_CASE("sic_curve: endpoints, bounds, degenerate query") {
    const auto clf = center_classifier();
    const auto x = spot_image();
    SaliencyMap s(kShape, 0.0);
    s.at(7, 7) = 1.0;
    const auto curve = sic_curve(clf, x, s);
    REQUIRE(curve.points.size() == SicOptions::default_fractions().size());
    CHECK(curve.points.front().fraction == 0.0);
    CHECK(curve.points.front().normalized_softmax == 0.0);
    CHECK(curve.points.back().fraction == 1.0);
    CHECK(curve.points.back().normalized_softmax == 1.0);
    CHECK(curve.auc >= 0.0);
    CHECK(curve.auc <= 1.0);
    for (const auto& p : curve.points) {
        CHECK(p.normalized_softmax >= 0.0);
        CHECK(p.normalized_softmax <= 1.0);
    }

    try {
        sic_curve(clf, Image(kShape, 0.3), s);
        FAIL("expected a throw");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()) == "query uninformative under blur");
    }
    CHECK_THROWS_AS(sic_curve(clf, x, SaliencyMap({2, 2})), std::invalid_argument);
}

TEST_CASE("sic_curve: well-placed saliency beats misplaced saliency") {
    const auto clf = center_classifier();
    const auto x = spot_image();
    SaliencyMap good(kShape, 0.0);
    SaliencyMap bad(kShape, 0.0);
    for (std::size_t r = 6; r < 10; ++r)
        for (std::size_t c = 6; c < 10; ++c) good.at(r, c) = 1.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) bad.at(r, c) = 1.0;
    CHECK(sic_curve(clf, x, good).auc > sic_curve(clf, x, bad).auc);
}

TEST_CASE("sic property: nested reveal sets and order-only dependence") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto clf = center_classifier();
    const auto x = spot_image();
    const auto fractions = SicOptions::default_fractions();
    for (int trial = 0; trial < 10; ++trial) {
        SaliencyMap s(kShape);
        for (double& v : s.values()) v = u(rng);
        const auto order = saliency_order(s);
        std::set<std::size_t> prev;
        for (double f : fractions) {
            const auto count = static_cast<std::size_t>(std::ceil(f * static_cast<double>(order.size())));
            std::set<std::size_t> revealed(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
            CHECK(std::includes(revealed.begin(), revealed.end(), prev.begin(), prev.end()));
            prev = std::move(revealed);
        }
        // a strictly monotone transform keeps the ordering and so the curve
        SaliencyMap cubed = s;
        for (double& v : cubed.values()) v = v * v * v + 3.0;
        const auto a = sic_curve(clf, x, s);
        const auto b = sic_curve(clf, x, cubed);
        CHECK(a.auc == b.auc);
        for (std::size_t i = 0; i < a.points.size(); ++i)
            CHECK(a.points[i].normalized_softmax == b.points[i].normalized_softmax);
    }
}

TEST_CASE("compare_methods and summarize_methods") {
    const auto clf = center_classifier();
    const auto x = spot_image();
    SaliencyMap s(kShape, 0.0);
    s.at(7, 7) = 1.0;
    const auto one = compare_methods(clf, x, {{"only", s}});
    REQUIRE(one.size() == 1);
    CHECK(one[0].name == "only");
    CHECK(one[0].auc == sic_curve(clf, x, s).auc);

    const auto twins = compare_methods(clf, x, {{"a", s}, {"b", s}});
    CHECK(twins[0].auc == twins[1].auc);
    CHECK_THROWS_AS(compare_methods(clf, x, {}), std::invalid_argument);
    CHECK_THROWS_AS(compare_methods(clf, x, {{"a", s}, {"b", SaliencyMap({2, 2})}}), std::invalid_argument);

    SaliencyMap flat(kShape, 1.0);
    std::vector<std::vector<MethodScore>> per_query{compare_methods(clf, x, {{"a", s}, {"b", flat}}),
                                                    compare_methods(clf, x, {{"a", flat}, {"b", flat}}),
                                                    compare_methods(clf, x, {{"a", s}, {"b", s}})};
    const auto summary = summarize_methods(per_query);
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].name == "a");
    CHECK(summary[0].queries == 3);
    CHECK(summary[0].median_auc == per_query[0][0].auc);
    CHECK(summary[1].median_auc == per_query[0][1].auc);
    CHECK(summary[0].median_curve.size() == per_query[0][0].curve.points.size());
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_THROWS_AS(median({}), std::invalid_argument);
}
