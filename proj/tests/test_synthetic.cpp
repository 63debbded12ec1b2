#include <doctest.h>

#include "contrex/attributes.hpp"
#include "contrex/synthetic.hpp"
#include "test_support.hpp"

using namespace contrex;

TEST_CASE("make_lesion_dataset: two images, one of each class") {
    const auto data = make_lesion_dataset(2, {64, 64}, 1);
    REQUIRE(data.images.size() == 2);
    CHECK(data.labels == std::vector<int>{1, 0});
    CHECK_THROWS_AS(make_lesion_dataset(1, {64, 64}, 1), std::invalid_argument);
}

TEST_CASE("make_lesion_dataset: positives brighter inside the mask, reproducible") {
    const auto data = make_lesion_dataset(40, {64, 64}, 3);
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        const auto& img = data.images[i];
        const auto& mask = data.masks[i];
        double inside = 0.0;
        double outside = 0.0;
        double n_in = 0.0;
        for (std::size_t p = 0; p < img.size(); ++p) {
            if (mask[p] > 0.5) {
                inside += img[p];
                n_in += 1.0;
            } else {
                outside += img[p];
            }
        }
        if (data.labels[i] == 1) {
            REQUIRE(n_in > 0.0);
            CHECK(inside / n_in > outside / (static_cast<double>(img.size()) - n_in));
        } else {
            CHECK(n_in == 0.0);
        }
        for (double v : img.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    const auto again = make_lesion_dataset(40, {64, 64}, 3);
    CHECK(again.images == data.images);
    CHECK(again.masks == data.masks);
    CHECK(make_lesion_dataset(40, {64, 64}, 4).images != data.images);
}

TEST_CASE("validate_lesion rejects disks that do not fit or are too dim") {
    CHECK_THROWS_AS(validate_lesion({64, 64}, {2.0, 30.0, 6.0, 0.8, 1.6}, 0.35), std::invalid_argument);
    CHECK_THROWS_AS(validate_lesion({64, 64}, {32.0, 32.0, 6.0, 0.2, 1.6}, 0.35), std::invalid_argument);
    CHECK_NOTHROW(validate_lesion({64, 64}, {32.0, 32.0, 6.0, 0.8, 1.6}, 0.35));
}

TEST_CASE("lesion template: disk plus weaker halo") {
    const LesionSpec spec{32.0, 32.0, 6.0, 0.85, 1.6};
    const auto t = lesion_template({64, 64}, spec, 0.35, 0.35);
    CHECK(t.at(32, 32) == doctest::Approx(0.5));
    CHECK(t.at(32, 39) > 0.0);
    CHECK(t.at(32, 39) < t.at(32, 32));
    CHECK(t.at(32, 50) == 0.0);
    const auto m = lesion_mask({64, 64}, spec);
    CHECK(m.at(32, 32) == 1.0);
    CHECK(m.at(32, 39) == 0.0);
}

TEST_CASE("planted generator: axis, dominance, zero-lesion latent") {
    const Geometry geo;
    const auto planted = make_planted_generator(geo, 2, 5);
    CHECK(planted.truth.direction() == Vector::unit(8, 2));
    const auto& a = planted.generator.first_layer_weights();
    const double lesion_norm = norm(a.column(2));
    for (std::size_t i = 0; i < 8; ++i) {
        if (i != 2) CHECK(2.0 * norm(a.column(i)) <= lesion_norm);
    }

    const auto dirs = sefa_directions(a, 8);
    CHECK(std::abs(cosine(dirs[0].direction(), planted.truth.direction())) >= 0.999);

    // no lesion coordinate: nothing in the disk exceeds the brightest background pixel
    auto latents = sample_fixture_latents(8, 2, 5, 0.0, 0.0, 6);
    for (const auto& w : latents) {
        const auto img = generate(planted.generator, w);
        double inside_max = 0.0;
        double outside_max = 0.0;
        for (std::size_t p = 0; p < img.size(); ++p) {
            (planted.mask[p] > 0.5 ? inside_max : outside_max) =
                std::max(planted.mask[p] > 0.5 ? inside_max : outside_max, img[p]);
        }
        CHECK(inside_max <= outside_max);
    }

    Vector full(8);
    full[2] = planted.full_lesion_coordinate;
    const auto img = generate(planted.generator, full);
    CHECK(img.at(static_cast<std::size_t>(planted.lesion.center_row),
                 static_cast<std::size_t>(planted.lesion.center_col)) > 0.6);

    CHECK_THROWS_AS(make_planted_generator(geo, 8, 5), std::invalid_argument);
    CHECK(make_planted_generator(geo, 2, 5).generator.first_layer_weights() == a);
}

TEST_CASE("sample_fixture_latents") {
    const auto w = sample_fixture_latents(8, 1, 50, 20.0, 28.0, 3);
    REQUIRE(w.size() == 50);
    for (const auto& v : w) {
        CHECK(v.dim() == 8);
        CHECK(v[1] >= 20.0);
        CHECK(v[1] <= 28.0);
    }
    CHECK(sample_fixture_latents(8, 1, 50, 20.0, 28.0, 3) == w);
}
