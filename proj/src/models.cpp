#include "contrex/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

namespace contrex {

// ---------------------------------------------------------------------------
// Generator

GeneratorModel::GeneratorModel(Shape shape, Matrix basis, Vector bias)
    : shape_(shape), basis_(std::move(basis)), bias_(std::move(bias)) {
    if (basis_.rows() != shape_.size()) {
        throw std::invalid_argument(fmt::format("generator basis has {} rows but image has {} pixels",
                                                basis_.rows(), shape_.size()));
    }
    if (bias_.dim() != shape_.size()) {
        throw std::invalid_argument(
            fmt::format("generator bias has {} entries but image has {} pixels", bias_.dim(), shape_.size()));
    }
    if (basis_.cols() == 0) throw std::invalid_argument("generator latent dimension must be positive");
}

SignedMap GeneratorModel::pre_clamp(const Vector& w) const {
    if (w.dim() != latent_dim()) {
        throw std::invalid_argument(
            fmt::format("generate: latent has dim {} but generator expects {}", w.dim(), latent_dim()));
    }
    std::vector<double> out(shape_.size());
    const std::size_t d = latent_dim();
    const auto& b = basis_.storage();
    for (std::size_t p = 0; p < out.size(); ++p) {
        double acc = bias_[p];
        const double* row = b.data() + p * d;
        for (std::size_t k = 0; k < d; ++k) acc += row[k] * w[k];
        out[p] = acc;
    }
    return SignedMap(shape_, std::move(out));
}

Image generate(const GeneratorModel& g, const Vector& w) {
    auto pre = g.pre_clamp(w);
    std::vector<double> px(pre.storage());
    for (double& v : px) v = std::clamp(v, 0.0, 1.0);
    return Image(g.shape(), std::move(px));
}

const Matrix& first_layer_weights(const GeneratorModel& g) { return g.first_layer_weights(); }

bool saturates(const GeneratorModel& g, const Vector& w) {
    const auto pre = g.pre_clamp(w);
    return std::any_of(pre.values().begin(), pre.values().end(), [](double v) { return v < 0.0 || v > 1.0; });
}

// ---------------------------------------------------------------------------
// Classifier

std::string_view to_string(Architecture a) {
    return a == Architecture::logistic ? "logistic" : "mlp";
}

Architecture architecture_from_string(std::string_view name) {
    if (name == "logistic") return Architecture::logistic;
    if (name == "mlp") return Architecture::mlp;
    throw std::invalid_argument(fmt::format("unknown classifier architecture '{}'", name));
}

double sigmoid(double z) {
    // Clamped so finite logits always land strictly inside (0,1).
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return std::clamp(s, lo, hi);
}

namespace {

void require_finite_params(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(fmt::format("{} contains a non-finite weight", what));
}

}  // namespace

ClassifierModel::ClassifierModel(Shape input_shape, LogisticParams params)
    : shape_(input_shape), params_(std::move(params)) {
    const auto& p = std::get<LogisticParams>(params_);
    if (p.weights.size() != shape_.size()) {
        throw std::invalid_argument(fmt::format("logistic classifier has {} weights for {} inputs",
                                                p.weights.size(), shape_.size()));
    }
    require_finite_params(p.weights, "logistic classifier");
    if (!std::isfinite(p.bias)) throw std::invalid_argument("logistic classifier bias is not finite");
}

ClassifierModel::ClassifierModel(Shape input_shape, MlpParams params)
    : shape_(input_shape), params_(std::move(params)) {
    const auto& p = std::get<MlpParams>(params_);
    if (p.hidden == 0) throw std::invalid_argument("mlp classifier needs a positive hidden width");
    if (p.w1.size() != p.hidden * shape_.size() || p.b1.size() != p.hidden || p.w2.size() != p.hidden) {
        throw std::invalid_argument(fmt::format("mlp classifier weights do not match hidden={} inputs={}",
                                                p.hidden, shape_.size()));
    }
    require_finite_params(p.w1, "mlp classifier");
    require_finite_params(p.b1, "mlp classifier");
    require_finite_params(p.w2, "mlp classifier");
    if (!std::isfinite(p.b2)) throw std::invalid_argument("mlp classifier bias is not finite");
}

ClassifierModel ClassifierModel::zeros(Shape input_shape, Architecture arch, std::size_t hidden) {
    if (arch == Architecture::logistic) {
        return {input_shape, LogisticParams{std::vector<double>(input_shape.size(), 0.0), 0.0}};
    }
    MlpParams p;
    p.hidden = hidden;
    p.w1.assign(hidden * input_shape.size(), 0.0);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(hidden, 0.0);
    return {input_shape, std::move(p)};
}

Architecture ClassifierModel::architecture() const noexcept {
    return std::holds_alternative<LogisticParams>(params_) ? Architecture::logistic : Architecture::mlp;
}

double ClassifierModel::logit(std::span<const double> x) const {
    if (x.size() != input_dim()) {
        throw std::invalid_argument(
            fmt::format("classify: input has {} pixels but classifier expects {}x{}", x.size(), shape_.height,
                        shape_.width));
    }
    if (const auto* lp = std::get_if<LogisticParams>(&params_)) {
        return std::inner_product(x.begin(), x.end(), lp->weights.begin(), lp->bias);
    }
    const auto& mp = std::get<MlpParams>(params_);
    const std::size_t n = input_dim();
    double z = mp.b2;
    for (std::size_t h = 0; h < mp.hidden; ++h) {
        const double* row = mp.w1.data() + h * n;
        const double pre = std::inner_product(x.begin(), x.end(), row, mp.b1[h]);
        if (pre > 0.0) z += mp.w2[h] * pre;
    }
    return z;
}

double ClassifierModel::score(std::span<const double> x) const { return sigmoid(logit(x)); }

void ClassifierModel::gradient(std::span<const double> x, std::span<double> out) const {
    if (out.size() != input_dim()) throw std::invalid_argument("gradient output buffer has wrong size");
    const double s = score(x);
    const double ds = s * (1.0 - s);
    if (const auto* lp = std::get_if<LogisticParams>(&params_)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = ds * lp->weights[i];
        return;
    }
    const auto& mp = std::get<MlpParams>(params_);
    const std::size_t n = input_dim();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t h = 0; h < mp.hidden; ++h) {
        const double* row = mp.w1.data() + h * n;
        const double pre = std::inner_product(x.begin(), x.end(), row, mp.b1[h]);
        if (pre <= 0.0) continue;
        const double upstream = ds * mp.w2[h];
        for (std::size_t i = 0; i < n; ++i) out[i] += upstream * row[i];
    }
}

double classify(const ClassifierModel& c, const Image& x) {
    if (x.shape() != c.input_shape()) {
        throw std::invalid_argument(fmt::format("classify: image is {}x{} but classifier expects {}x{}",
                                                x.height(), x.width(), c.input_shape().height,
                                                c.input_shape().width));
    }
    return c.score(x.values());
}

Gradient input_gradient(const ClassifierModel& c, const Image& x) {
    if (x.shape() != c.input_shape()) {
        throw std::invalid_argument(fmt::format("input_gradient: image is {}x{} but classifier expects {}x{}",
                                                x.height(), x.width(), c.input_shape().height,
                                                c.input_shape().width));
    }
    Gradient g(x.shape());
    c.gradient(x.values(), g.values());
    return g;
}

// ---------------------------------------------------------------------------
// Training

namespace {

ClassifierModel initial_model(Shape shape, const TrainOptions& options, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> init(-0.01, 0.01);
    const std::size_t n = shape.size();
    if (options.architecture == Architecture::logistic) {
        LogisticParams p;
        p.weights.resize(n);
        for (double& w : p.weights) w = init(rng);
        p.bias = init(rng);
        return {shape, std::move(p)};
    }
    if (options.hidden_width == 0) throw std::invalid_argument("mlp training needs hidden_width > 0");
    MlpParams p;
    p.hidden = options.hidden_width;
    p.w1.resize(p.hidden * n);
    for (double& w : p.w1) w = init(rng);
    p.b1.resize(p.hidden);
    for (double& b : p.b1) b = init(rng);
    p.w2.resize(p.hidden);
    for (double& w : p.w2) w = init(rng);
    p.b2 = init(rng);
    return {shape, std::move(p)};
}

// One gradient-descent step on the batch for the logistic model.
void logistic_step(LogisticParams& p, const LabeledDataset& data, std::span<const std::size_t> batch,
                   double lr) {
    std::vector<double> gw(p.weights.size(), 0.0);
    double gb = 0.0;
    for (std::size_t idx : batch) {
        const auto x = data.images[idx].values();
        const double s = sigmoid(std::inner_product(x.begin(), x.end(), p.weights.begin(), p.bias));
        const double err = s - static_cast<double>(data.labels[idx]);
        for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += err * x[i];
        gb += err;
    }
    const double scale = lr / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < gw.size(); ++i) p.weights[i] -= scale * gw[i];
    p.bias -= scale * gb;
}

void mlp_step(MlpParams& p, std::size_t n, const LabeledDataset& data, std::span<const std::size_t> batch,
              double lr) {
    std::vector<double> gw1(p.w1.size(), 0.0);
    std::vector<double> gb1(p.hidden, 0.0);
    std::vector<double> gw2(p.hidden, 0.0);
    double gb2 = 0.0;
    std::vector<double> act(p.hidden);
    for (std::size_t idx : batch) {
        const auto x = data.images[idx].values();
        double z = p.b2;
        for (std::size_t h = 0; h < p.hidden; ++h) {
            const double pre = std::inner_product(x.begin(), x.end(), p.w1.data() + h * n, p.b1[h]);
            act[h] = pre > 0.0 ? pre : 0.0;
            z += p.w2[h] * act[h];
        }
        const double err = sigmoid(z) - static_cast<double>(data.labels[idx]);
        gb2 += err;
        for (std::size_t h = 0; h < p.hidden; ++h) {
            gw2[h] += err * act[h];
            if (act[h] <= 0.0) continue;
            const double delta = err * p.w2[h];
            gb1[h] += delta;
            double* grow = gw1.data() + h * n;
            for (std::size_t i = 0; i < n; ++i) grow[i] += delta * x[i];
        }
    }
    const double scale = lr / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < p.w1.size(); ++i) p.w1[i] -= scale * gw1[i];
    for (std::size_t h = 0; h < p.hidden; ++h) {
        p.b1[h] -= scale * gb1[h];
        p.w2[h] -= scale * gw2[h];
    }
    p.b2 -= scale * gb2;
}

}  // namespace

TrainResult train_classifier(const LabeledDataset& data, const TrainOptions& options) {
    if (data.images.empty()) throw std::invalid_argument("train_classifier: empty dataset");
    if (data.labels.size() != data.images.size()) {
        throw std::invalid_argument("train_classifier: labels and images differ in count");
    }
    const bool has_pos = std::find(data.labels.begin(), data.labels.end(), 1) != data.labels.end();
    const bool has_neg = std::find(data.labels.begin(), data.labels.end(), 0) != data.labels.end();
    if (!has_pos || !has_neg) throw std::invalid_argument("train_classifier: dataset must contain both labels");
    if (options.batch_size == 0) throw std::invalid_argument("train_classifier: batch_size must be positive");

    const Shape shape = data.images.front().shape();
    for (const auto& img : data.images) require_same_shape(img, data.images.front(), "train_classifier");

    std::mt19937_64 rng(options.seed);
    ClassifierModel model = initial_model(shape, options, rng);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto params = model.params();
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t len = std::min(options.batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            if (auto* lp = std::get_if<LogisticParams>(&params)) {
                logistic_step(*lp, data, batch, options.learning_rate);
            } else {
                mlp_step(std::get<MlpParams>(params), shape.size(), data, batch, options.learning_rate);
            }
        }
    }
    if (auto* lp = std::get_if<LogisticParams>(&params)) {
        model = ClassifierModel(shape, std::move(*lp));
    } else {
        model = ClassifierModel(shape, std::move(std::get<MlpParams>(params)));
    }
    const double loss = cross_entropy(model, data.images, data.labels);
    return {std::move(model), loss};
}

double accuracy(const ClassifierModel& c, std::span<const Image> images, std::span<const int> labels) {
    if (images.size() != labels.size() || images.empty()) {
        throw std::invalid_argument("accuracy: need matching, nonempty images and labels");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const int predicted = classify(c, images[i]) > 0.5 ? 1 : 0;
        if (predicted == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(images.size());
}

double cross_entropy(const ClassifierModel& c, std::span<const Image> images, std::span<const int> labels) {
    if (images.size() != labels.size() || images.empty()) {
        throw std::invalid_argument("cross_entropy: need matching, nonempty images and labels");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const double s = classify(c, images[i]);
        total -= labels[i] == 1 ? std::log(s) : std::log1p(-s);
    }
    return total / static_cast<double>(images.size());
}

}  // namespace contrex
