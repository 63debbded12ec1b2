#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace contrex {

struct Shape {
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return height * width; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Row-major H×W field of reals. The tag keeps images, gradients, masks and
/// saliency maps from being mixed up; conversions go through `retag`.
template <class Tag>
class Raster {
public:
    Raster() = default;
    explicit Raster(Shape shape, double fill = 0.0) : shape_(shape), values_(shape.size(), fill) {}
    Raster(Shape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw std::invalid_argument(fmt::format("raster {}x{} needs {} values, got {}", shape_.height,
                                                    shape_.width, shape_.size(), values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw std::invalid_argument("raster contains a non-finite value");
        }
    }

    Shape shape() const noexcept { return shape_; }
    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * shape_.width + c]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * shape_.width + c]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    const std::vector<double>& storage() const noexcept { return values_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    Shape shape_{};
    std::vector<double> values_;
};

struct ImageTag {};
struct GradientTag {};
struct SignedMapTag {};
struct SaliencyTag {};
struct MaskTag {};

/// Grayscale raster; generated images lie in [0,1].
using Image = Raster<ImageTag>;
/// ∂score/∂pixel.
using Gradient = Raster<GradientTag>;
/// Signed attribution before absolute value / thresholding.
using SignedMap = Raster<SignedMapTag>;
/// Nonnegative per-pixel attribution.
using SaliencyMap = Raster<SaliencyTag>;
/// Binary 0/1 region.
using Mask = Raster<MaskTag>;

template <class To, class From>
Raster<To> retag(const Raster<From>& r) {
    return Raster<To>(r.shape(), r.storage());
}

template <class A, class B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(fmt::format("{}: shape mismatch ({}x{} vs {}x{})", op, a.height(),
                                                a.width(), b.height(), b.width()));
    }
}

/// Binary dilation with a Euclidean disk of the given radius.
Mask dilate(const Mask& mask, double radius);

/// Fraction of the total map mass that falls inside the mask (0 for an empty map).
double mass_fraction_inside(const SaliencyMap& map, const Mask& mask);

}  // namespace contrex
