// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <map>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "contrex/app/commands.hpp"
#include "contrex/app/netpbm.hpp"
#include "contrex/attributes.hpp"
#include "contrex/metrics.hpp"
#include "contrex/saliency.hpp"
#include "contrex/synthetic.hpp"
#include "contrex/traversal.hpp"
#include "test_support.hpp"

using namespace contrex;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double sigmoid_ref(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Central differences of the score, evaluated straight from the model
/// parameters. Pre-activations are computed once; a single-pixel perturbation
/// then shifts each of them by w·h, so every perturbed forward pass is exact
/// but costs O(hidden) instead of O(hidden·pixels).
std::vector<double> reference_fd(const ClassifierModel& c, const Image& x, double h) {
    const auto xs = x.values();
    std::vector<double> out(x.size());
    if (const auto* lp = std::get_if<LogisticParams>(&c.params())) {
        const double z = std::inner_product(xs.begin(), xs.end(), lp->weights.begin(), lp->bias);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double dz = lp->weights[i] * h;
            out[i] = (sigmoid_ref(z + dz) - sigmoid_ref(z - dz)) / (2.0 * h);
        }
        return out;
    }
    const auto& mp = std::get<MlpParams>(c.params());
    const std::size_t n = x.size();
    std::vector<double> pre(mp.hidden);
    for (std::size_t k = 0; k < mp.hidden; ++k)
        pre[k] = std::inner_product(xs.begin(), xs.end(), mp.w1.begin() + static_cast<std::ptrdiff_t>(k * n), mp.b1[k]);
    auto score = [&](std::size_t i, double delta) {
        double z = mp.b2;
        for (std::size_t k = 0; k < mp.hidden; ++k) z += mp.w2[k] * std::max(0.0, pre[k] + mp.w1[k * n + i] * delta);
        return sigmoid_ref(z);
    };
    for (std::size_t i = 0; i < n; ++i) out[i] = (score(i, h) - score(i, -h)) / (2.0 * h);
    return out;
}

/// The two reference classifiers: logistic and one-hidden-layer MLP, both
/// trained on the lesion fixture exactly as the pipeline trains them.
struct ReferenceModels {
    std::vector<ClassifierModel> trained;
    /// Random-weight models of both architectures, used as extra gradient
    /// cases because their gradients are not shaped by the training data.
    std::vector<ClassifierModel> random;
};

ReferenceModels make_reference_models() {
    const Geometry geo;
    const auto data = make_lesion_dataset(500, geo.shape(), 7);
    LabeledDataset train;
    train.images.assign(data.images.begin(), data.images.begin() + 400);
    train.labels.assign(data.labels.begin(), data.labels.begin() + 400);
    TrainOptions opts;
    opts.seed = 8;
    ReferenceModels out;
    out.trained.push_back(train_classifier(train, opts).model);
    opts.architecture = Architecture::mlp;
    out.trained.push_back(train_classifier(train, opts).model);
    std::mt19937_64 rng(100);
    out.random.push_back(testing::random_logistic(geo.shape(), rng, 0.05));
    out.random.push_back(testing::random_mlp(geo.shape(), 16, rng, 0.05));
    return out;
}

Outcome gradient_correctness(const ReferenceModels& refs) {
    std::mt19937_64 rng(101);
    const auto t0 = Clock::now();
    testing::GradientCheck worst;
    for (int i = 0; i < 20; ++i) {
        const auto x = testing::random_image(Geometry{}.shape(), rng);
        for (const auto* set : {&refs.trained, &refs.random}) {
            for (const auto& c : *set) {
                const auto check = testing::compare_gradients(input_gradient(c, x).values(), reference_fd(c, x, 1e-3));
                worst.max_relative_error = std::max(worst.max_relative_error, check.max_relative_error);
                worst.max_absolute_error_small =
                    std::max(worst.max_absolute_error_small, check.max_absolute_error_small);
            }
        }
    }
    const double t = seconds_since(t0);
    return {worst.pass(1e-4, 1e-6) && t < 5.0,
            fmt::format("max rel err {:.2e}, max abs err (small) {:.2e}, {:.2f}s", worst.max_relative_error,
                        worst.max_absolute_error_small, t)};
}

Outcome ig_completeness(const ReferenceModels& refs) {
    std::mt19937_64 rng(102);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto x = testing::random_image(Geometry{}.shape(), rng);
        const auto b = testing::random_image(Geometry{}.shape(), rng);
        for (const auto& c : refs.trained) {
            const auto attr = integrated_gradients_signed(c, x, b, 512);
            const double sum = std::accumulate(attr.values().begin(), attr.values().end(), 0.0);
            worst = std::max(worst, std::abs(sum - (classify(c, x) - classify(c, b))));
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-3 && t < 10.0, fmt::format("max completeness gap {:.2e}, {:.2f}s", worst, t)};
}

Outcome sefa_recovery() {
    const auto t0 = Clock::now();
    const Geometry geo;
    const auto planted = make_planted_generator(geo, 0, 103);
    const auto& a = planted.generator.first_layer_weights();
    const auto ata = gram(a);
    const auto eig = sym_eigen(ata);
    const auto recon =
        multiply(multiply(eig.vectors, Matrix::diagonal(eig.values.values())), transpose(eig.vectors));
    const double rel = frobenius_norm(subtract(recon, ata)) / frobenius_norm(ata);
    const auto dirs = sefa_directions(a, 1);
    const double cos = std::abs(cosine(dirs[0].direction(), planted.truth.direction()));
    const double t = seconds_since(t0);
    return {cos >= 0.999 && rel <= 1e-7 && t < 2.0,
            fmt::format("|cos| {:.6f}, reconstruction {:.2e}, {:.3f}s", cos, rel, t)};
}

Outcome retrieval_oracle() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(2, 40);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        std::vector<double> scores(n);
        std::vector<double> alphas(n);
        const int kind = trial % 5;
        for (std::size_t j = 0; j < n; ++j) {
            alphas[j] = -10.0 + 20.0 * static_cast<double>(j) / static_cast<double>(n - 1);
            switch (kind) {
                case 0: scores[j] = 0.5 + 0.5 * u(rng) + 1e-12; break;      // all above
                case 1: scores[j] = 0.5 * u(rng); break;                    // all below
                case 2: scores[j] = u(rng) < 0.4 ? 0.5 : u(rng); break;     // exact 0.5 entries
                case 3: scores[j] = std::round(u(rng) * 6.0) / 6.0; break;  // heavy ties
                default: scores[j] = u(rng);
            }
        }
        if (retrieve_contrastives(scores, alphas) != testing::brute_force_contrastives(scores, alphas)) ++mismatches;
    }
    return {mismatches == 0, fmt::format("{} mismatches over 100 score vectors", mismatches)};
}

struct World {
    testing::FixtureWorld fixture = testing::make_fixture_world(7);
    std::vector<Vector> queries = sample_fixture_latents(8, 0, 50, 20.0, 28.0, 105);
};

Outcome monotone_traversal(const World& w) {
    std::size_t violations = 0;
    std::size_t confident = 0;
    std::size_t missing = 0;
    double worst_rise = 0.0;
    for (std::size_t q = 0; q < 20; ++q) {
        const auto path = build_path(w.fixture.planted.generator, w.fixture.classifier, w.queries[q],
                                     w.fixture.planted.truth, {});
        for (std::size_t j = 1; j < path.size(); ++j) {
            if (saturates(w.fixture.planted.generator, path.latents[j])) break;
            const double rise = path.scores[j] - path.scores[j - 1];
            worst_rise = std::max(worst_rise, rise);
            if (rise > 1e-9) ++violations;
        }
        if (path.query_score() >= 0.9) {
            ++confident;
            const auto pair = retrieve_contrastives(path);
            if (!pair.counterfactual || !pair.semifactual) ++missing;
        }
    }
    return {violations == 0 && missing == 0 && confident > 0,
            fmt::format("{} increases (max rise {:.1e}); {}/{} confident queries with both cf and sf", violations,
                        worst_rise, confident - missing, confident)};
}

Outcome saliency_localization(const World& w) {
    const auto mask = dilate(w.fixture.planted.mask, 2.0);
    double contrastive = 0.0;
    double gradient = 0.0;
    for (const auto& q : w.queries) {
        const auto path = build_path(w.fixture.planted.generator, w.fixture.classifier, q, w.fixture.planted.truth, {});
        contrastive += mass_fraction_inside(contrastive_saliency(w.fixture.classifier, path), mask);
        gradient += mass_fraction_inside(plain_gradient(w.fixture.classifier, path.query_image()), mask);
    }
    contrastive /= static_cast<double>(w.queries.size());
    gradient /= static_cast<double>(w.queries.size());
    return {contrastive >= 0.60 && contrastive > gradient,
            fmt::format("mean mass inside mask: contrastive {:.3f}, plain gradient {:.3f}", contrastive, gradient)};
}

Outcome sic_sanity(const World& w) {
    const auto& clf = w.fixture.classifier;
    const auto& mask = w.fixture.planted.mask;
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t wins = 0;
    std::size_t evaluated = 0;
    bool bounded = true;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < w.queries.size(); ++i) {
        const auto path = build_path(w.fixture.planted.generator, clf, w.queries[i], w.fixture.planted.truth, {});
        const auto& x = path.query_image();
        const auto pair = retrieve_contrastives(path);
        const Image baseline = pair.counterfactual ? path.images[*pair.counterfactual] : Image(x.shape(), 0.0);
        SaliencyMap random(x.shape());
        for (double& v : random.values()) v = u(rng);
        const std::vector<NamedMap> maps{
            {"contrastive", contrastive_saliency(clf, path)},
            {"integrated_gradients", integrated_gradients(clf, x, baseline, 64)},
            {"smoothgrad", smoothgrad(clf, x, 0.1, 16, 1000 + i)},
            {"gradient", plain_gradient(clf, x)},
            {"mask", retag<SaliencyTag>(mask)},
            {"random", random},
        };
        const auto scores = compare_methods(clf, x, maps);
        ++evaluated;
        for (const auto& s : scores) bounded = bounded && s.auc >= 0.0 && s.auc <= 1.0;
        if (scores[4].auc > scores[5].auc) ++wins;
    }
    const double t = seconds_since(t0);
    const double rate = static_cast<double>(wins) / static_cast<double>(evaluated);
    return {rate >= 0.9 && bounded && t < 120.0,
            fmt::format("mask beats random on {}/{} queries; AUCs in [0,1]: {}; 4 methods x {} queries in {:.1f}s",
                        wins, evaluated, bounded ? "yes" : "no", evaluated, t)};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        auto bytes = app::read_file(entry.path());
        if (entry.path().filename() == "manifest.json") {
            auto doc = nlohmann::json::parse(bytes);
            doc.erase(app::kTimestampField);
            bytes = doc.dump(2);
        }
        files[fs::relative(entry.path(), root).string()] = std::move(bytes);
    }
    return files;
}

Outcome end_to_end_determinism() {
    const auto dir = testing::scratch_dir("acceptance_demo");
    double slowest = 0.0;
    for (const char* run : {"a", "b"}) {
        const auto t0 = Clock::now();
        const std::string cmd = fmt::format("{} demo --seed 7 --out {} > {} 2>&1", CONTREX_CLI_PATH,
                                            (dir / run).string(), (dir / (std::string(run) + ".log")).string());
        if (std::system(cmd.c_str()) != 0) return {false, fmt::format("demo run '{}' failed", run)};
        slowest = std::max(slowest, seconds_since(t0));
    }
    const auto a = snapshot(dir / "a");
    const auto b = snapshot(dir / "b");
    std::size_t differing = 0;
    for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != bytes) ++differing;
    }
    if (a.size() != b.size()) ++differing;
    return {differing == 0 && !a.empty() && slowest < 60.0,
            fmt::format("{} files compared, {} differ; slowest run {:.1f}s", a.size(), differing, slowest)};
}

Outcome structural_invariants(const World& w) {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t annihilation_failures = 0;
    std::size_t scaling_failures = 0;
    ContrastiveOptions with_query;
    with_query.include_query_term = true;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> dir(8);
        for (double& v : dir) v = g(rng);
        const AttributeVector attr(normalized(Vector(dir)), 0, 1.0);
        const TraversalRange range{-10.0 * u(rng), 5.0 + 25.0 * u(rng), 4 + static_cast<std::size_t>(trial)};
        const auto path = build_path(w.fixture.planted.generator, w.fixture.classifier,
                                     w.queries[static_cast<std::size_t>(trial)], attr, range);
        if (contrastive_saliency(w.fixture.classifier, path) !=
            contrastive_saliency(w.fixture.classifier, path, with_query))
            ++annihilation_failures;

        const auto raw = contrastive_raw(w.fixture.classifier, path);
        const auto base = mean_threshold(raw);
        for (double factor : {2.0, 4.0, 0.5}) {
            SignedMap scaled_raw = raw;
            for (double& v : scaled_raw.values()) v *= factor;
            const auto scaled_map = mean_threshold(scaled_raw);
            for (std::size_t i = 0; i < base.size(); ++i) {
                if ((base[i] > 0.0) != (scaled_map[i] > 0.0)) {
                    ++scaling_failures;
                    break;
                }
            }
        }
    }
    return {annihilation_failures == 0 && scaling_failures == 0,
            fmt::format("query-term mismatches {}/20, survivor-set changes {}/60", annihilation_failures,
                        scaling_failures)};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        if (!o.pass) ++failures;
        std::cout << fmt::format("[{}] {}. {}: {}", o.pass ? "PASS" : "FAIL", id, name, o.detail) << std::endl;
    };
    const auto refs = make_reference_models();
    report(1, "gradient correctness", [&] { return gradient_correctness(refs); });
    report(2, "IG completeness", [&] { return ig_completeness(refs); });
    report(3, "SeFa recovery", sefa_recovery);
    report(4, "contrastive retrieval oracle", retrieval_oracle);
    const World world;
    report(5, "monotone traversal", [&] { return monotone_traversal(world); });
    report(6, "saliency localization", [&] { return saliency_localization(world); });
    report(7, "SIC sanity ordering", [&] { return sic_sanity(world); });
    report(8, "end-to-end determinism", end_to_end_determinism);
    report(9, "structural invariants", [&] { return structural_invariants(world); });
    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
