#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "contrex/attributes.hpp"
#include "contrex/models.hpp"
#include "contrex/raster.hpp"

namespace contrex {

/// Image size plus latent dimension of the fixture world.
struct Geometry {
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t latent_dim = 8;

    Shape shape() const noexcept { return {height, width}; }
};

/// A bright disk with a softer inflammation halo around it.
struct LesionSpec {
    double center_row = 0.0;
    double center_col = 0.0;
    double radius = 6.0;
    double intensity = 0.85;
    /// Halo outer radius as a multiple of `radius`.
    double halo_multiplier = 1.6;
};

/// Shared look of the fixture images. Lengths are for a 64-pixel image side
/// and scale with min(height, width).
struct FixtureStyle {
    double background = 0.35;
    double noise_sd = 0.03;
    double smooth_amplitude = 0.04;
    double intensity_min = 0.7;
    double intensity_max = 0.9;
    double radius_min = 5.0;
    double radius_max = 7.0;
    double center_jitter = 4.0;
    double halo_multiplier = 1.6;
    /// Halo amplitude at the disk edge relative to the disk; falls linearly to 0.
    double halo_strength = 0.35;
};

/// Per-pixel brightness added on top of `background` by the lesion.
SignedMap lesion_template(Shape shape, const LesionSpec& lesion, double background, double halo_strength);
/// Ground-truth disk (halo excluded).
Mask lesion_mask(Shape shape, const LesionSpec& lesion);
/// Throws when the disk does not fit or intensity is below the background.
void validate_lesion(Shape shape, const LesionSpec& lesion, double background);

/// Half positives (even indices, bright disk + halo on a noisy smoothly varying
/// background) and half negatives (background only), with masks.
LabeledDataset make_lesion_dataset(std::size_t n, Shape shape, std::uint64_t seed, const FixtureStyle& style = {});

struct PlantedGenerator {
    GeneratorModel generator;
    /// e_{lesion_axis}.
    AttributeVector truth;
    std::size_t lesion_axis;
    LesionSpec lesion;
    Mask mask;
    /// Latent coordinate at which the lesion reaches `lesion.intensity`.
    double full_lesion_coordinate;
};

/// Latent coordinate that renders the lesion at full intensity.
inline constexpr double kFullLesionCoordinate = 25.0;

/// Affine generator whose `lesion_axis` column is the centered lesion
/// template. The other columns are smooth cosine patterns, Gram-Schmidt
/// orthogonalized against the template and each other, with norms at most
/// 0.45× the template's so the planted axis is the dominant right-singular
/// direction.
PlantedGenerator make_planted_generator(const Geometry& geometry, std::size_t lesion_axis, std::uint64_t seed,
                                        const FixtureStyle& style = {});

/// Fixture latents: lesion coordinate uniform in [lesion_min, lesion_max],
/// remaining coordinates N(0, background_sd²).
std::vector<Vector> sample_fixture_latents(std::size_t latent_dim, std::size_t lesion_axis, std::size_t n,
                                           double lesion_min, double lesion_max, std::uint64_t seed,
                                           double background_sd = 10.0);

}  // namespace contrex
