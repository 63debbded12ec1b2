#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "contrex/numerics.hpp"
#include "contrex/raster.hpp"

namespace contrex {

/// Affine latent-to-image map followed by a clamp to [0,1].
///
/// The basis is (H·W)×d; its columns are the per-latent-coordinate pixel
/// patterns, and it doubles as the first-layer weight matrix that closed-form
/// attribute factorization works on.
class GeneratorModel {
public:
    GeneratorModel(Shape shape, Matrix basis, Vector bias);

    Shape shape() const noexcept { return shape_; }
    std::size_t latent_dim() const noexcept { return basis_.cols(); }

    /// basis·w + bias, before clamping.
    SignedMap pre_clamp(const Vector& w) const;
    const Matrix& first_layer_weights() const noexcept { return basis_; }
    const Vector& bias() const noexcept { return bias_; }

private:
    Shape shape_;
    Matrix basis_;
    Vector bias_;
};

Image generate(const GeneratorModel& g, const Vector& w);
const Matrix& first_layer_weights(const GeneratorModel& g);
/// True when any pre-clamp pixel of G(w) lies outside [0,1].
bool saturates(const GeneratorModel& g, const Vector& w);

enum class Architecture { logistic, mlp };

std::string_view to_string(Architecture a);
Architecture architecture_from_string(std::string_view name);

struct LogisticParams {
    std::vector<double> weights;
    double bias = 0.0;
};

struct MlpParams {
    std::size_t hidden = 0;
    std::vector<double> w1;  ///< hidden × inputs, row-major
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

/// Binary image classifier with exact input gradients.
class ClassifierModel {
public:
    ClassifierModel(Shape input_shape, LogisticParams params);
    ClassifierModel(Shape input_shape, MlpParams params);

    static ClassifierModel zeros(Shape input_shape, Architecture arch, std::size_t hidden = 0);

    Architecture architecture() const noexcept;
    Shape input_shape() const noexcept { return shape_; }
    std::size_t input_dim() const noexcept { return shape_.size(); }

    const std::variant<LogisticParams, MlpParams>& params() const noexcept { return params_; }

    /// Pre-sigmoid score.
    double logit(std::span<const double> x) const;
    double score(std::span<const double> x) const;
    /// ∂score/∂x written into `out`.
    void gradient(std::span<const double> x, std::span<double> out) const;

private:
    Shape shape_;
    std::variant<LogisticParams, MlpParams> params_;
};

/// σ(C(x)) ∈ (0,1).
double classify(const ClassifierModel& c, const Image& x);
Gradient input_gradient(const ClassifierModel& c, const Image& x);

double sigmoid(double z);

struct LabeledDataset {
    std::vector<Image> images;
    std::vector<int> labels;
    /// Ground-truth lesion masks, empty or one per image.
    std::vector<Mask> masks;

    std::size_t size() const noexcept { return images.size(); }
};

struct TrainOptions {
    Architecture architecture = Architecture::logistic;
    std::size_t hidden_width = 16;
    std::size_t epochs = 40;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::uint64_t seed = 7;
};

struct TrainResult {
    ClassifierModel model;
    /// Mean cross-entropy over the training set after the last epoch.
    double final_loss;
};

/// Mini-batch gradient descent on binary cross-entropy.
///
/// Weights start uniform in (-0.01, 0.01) drawn from `options.seed`; batches
/// are reshuffled every epoch from the same stream, so the result is fully
/// determined by (data, options).
TrainResult train_classifier(const LabeledDataset& data, const TrainOptions& options);

double accuracy(const ClassifierModel& c, std::span<const Image> images, std::span<const int> labels);
double cross_entropy(const ClassifierModel& c, std::span<const Image> images, std::span<const int> labels);

}  // namespace contrex
