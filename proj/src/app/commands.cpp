#include "contrex/app/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "contrex/app/model_io.hpp"
#include "contrex/app/netpbm.hpp"
#include "contrex/metrics.hpp"
#include "contrex/saliency.hpp"
#include "contrex/synthetic.hpp"

namespace contrex::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Sub-streams derived from the run seed.
enum SeedOffset : std::uint64_t {
    kDatasetSeed = 0,
    kTrainSeed = 1,
    kGeneratorSeed = 2,
    kSeedLatents = 3,
    kBackgroundLatents = 4,
    kEvaluationQueries = 5,
    kDemoQueries = 6,
    kSmoothGradBase = 1000,
};

constexpr std::size_t kFixtureSeedCount = 64;

std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::string num(double v) { return fmt::format("{}", v); }

StoredGenerator load_generator(const RunConfig& cfg) {
    const auto file = cfg.generator_path();
    if (!fs::exists(file)) {
        throw std::runtime_error(fmt::format("generator model '{}' not found; run `contrex train` first", file.string()));
    }
    return generator_from_json(read_json(file));
}

ClassifierModel load_classifier(const RunConfig& cfg) {
    const auto file = cfg.classifier_path();
    if (!fs::exists(file)) {
        throw std::runtime_error(fmt::format("classifier model '{}' not found; run `contrex train` first", file.string()));
    }
    return classifier_from_json(read_json(file));
}

StoredAttributes load_attributes(const RunConfig& cfg) {
    const auto file = cfg.attributes_path();
    if (!fs::exists(file)) {
        throw std::runtime_error(fmt::format("attributes '{}' not found; run `contrex discover` first", file.string()));
    }
    return attributes_from_json(read_json(file));
}

void require_compatible(const GeneratorModel& g, const ClassifierModel& c) {
    if (g.shape() != c.input_shape()) {
        throw std::runtime_error(fmt::format("generator renders {}x{} images but classifier expects {}x{}",
                                             g.shape().height, g.shape().width, c.input_shape().height,
                                             c.input_shape().width));
    }
}

void require_safe_id(const std::string& id) {
    const bool ok = !id.empty() && id != "." && id != ".." &&
                    id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") ==
                        std::string::npos;
    if (!ok) throw std::runtime_error(fmt::format("query id '{}' is not a safe file name", id));
}

void export_dataset(const fs::path& dir, const LabeledDataset& data) {
    std::string index = "filename,label,mask_filename\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto image_name = fmt::format("image_{:04}.pgm", i);
        const auto mask_name = fmt::format("mask_{:04}.pgm", i);
        write_pgm(dir / image_name, data.images[i].shape(), data.images[i].values(), false);
        write_pgm(dir / mask_name, data.masks[i].shape(), data.masks[i].values(), false);
        index += fmt::format("{},{},{}\n", image_name, data.labels[i], mask_name);
    }
    write_file_atomic(dir / "index.csv", index);
}

json point_record(const TraversalPath& path, std::size_t j) {
    return {{"index", j},
            {"alpha", path.alphas[j]},
            {"score", path.scores[j]},
            {"image", fmt::format("path_{:03}.pgm", j)}};
}

std::string explanation_sentence(const std::string& id, const TraversalPath& path, const ContrastivePair& pair) {
    const double p = path.query_score();
    std::string s;
    if (p > 0.5) {
        s = fmt::format("Query {} is classified abnormal with probability {:.3f} because of the regions highlighted "
                        "in saliency.pgm.",
                        id, p);
    } else {
        s = fmt::format("Query {} is classified normal (probability of abnormality {:.3f}); saliency.pgm highlights "
                        "the regions that drive its score.",
                        id, p);
    }
    if (pair.semifactual) {
        const auto j = *pair.semifactual;
        s += p > 0.5 ? fmt::format(" Even with the attribute changed to alpha={}, the image is still classified "
                                   "abnormal (semifactual, p={:.3f}).",
                                   path.alphas[j], path.scores[j])
                     : fmt::format(" At alpha={} the image is classified abnormal (nearest point above the "
                                   "boundary, p={:.3f}).",
                                   path.alphas[j], path.scores[j]);
    } else {
        s += " No semifactual found on path.";
    }
    if (pair.counterfactual) {
        const auto j = *pair.counterfactual;
        if (p > 0.5) {
            s += fmt::format(" If the attribute changed as far as alpha={}, the image would no longer be classified "
                             "abnormal (counterfactual, p={:.3f}).",
                             path.alphas[j], path.scores[j]);
        } else if (j == path.query_index) {
            s += " The query itself is the path point closest to the boundary on the normal side.";
        } else {
            s += fmt::format(" At alpha={} the image is still classified normal (nearest point below the boundary, "
                             "p={:.3f}).",
                             path.alphas[j], path.scores[j]);
        }
    } else {
        s += " No counterfactual found on path.";
    }
    return s;
}

std::vector<QueryLatent> fixture_queries(const StoredGenerator& gen, const RunConfig& cfg) {
    if (!gen.fixture) {
        throw std::runtime_error("generator carries no fixture metadata; pass an explicit query set");
    }
    const auto latents =
        sample_fixture_latents(gen.model.latent_dim(), gen.fixture->lesion_axis, cfg.evaluation.queries,
                               cfg.evaluation.lesion_min, cfg.evaluation.lesion_max, cfg.seed + kEvaluationQueries);
    std::vector<QueryLatent> out;
    for (std::size_t i = 0; i < latents.size(); ++i) out.push_back({fmt::format("q{:03}", i), latents[i]});
    return out;
}

}  // namespace

TrainSummary cmd_train(const RunConfig& cfg, std::ostream& log) {
    validate(cfg);
    const auto& t = cfg.training;
    const Shape shape = cfg.geometry.shape();

    const auto data = make_lesion_dataset(t.dataset_size, shape, cfg.seed + kDatasetSeed);
    auto holdout = static_cast<std::size_t>(std::lround(t.holdout_fraction * static_cast<double>(data.size())));
    holdout = std::clamp<std::size_t>(holdout, 2, data.size() - 2);
    const std::size_t train_size = data.size() - holdout;

    LabeledDataset train;
    train.images.assign(data.images.begin(), data.images.begin() + static_cast<long>(train_size));
    train.labels.assign(data.labels.begin(), data.labels.begin() + static_cast<long>(train_size));
    const std::span<const Image> test_images(data.images.data() + train_size, holdout);
    const std::span<const int> test_labels(data.labels.data() + train_size, holdout);

    TrainOptions opts{t.architecture, t.hidden_width, t.epochs, t.learning_rate, t.batch_size, cfg.seed + kTrainSeed};
    const auto result = train_classifier(train, opts);
    const double acc = accuracy(result.model, test_images, test_labels);

    const auto planted = make_planted_generator(cfg.geometry, t.lesion_axis, cfg.seed + kGeneratorSeed);
    const FixtureInfo fixture{planted.lesion_axis, planted.full_lesion_coordinate};

    write_json(cfg.generator_path(), generator_to_json(planted.generator, fixture));
    write_json(cfg.classifier_path(), classifier_to_json(result.model));
    write_json(cfg.models_dir() / "training.json", {{"architecture", std::string(to_string(t.architecture))},
                                                    {"train_size", train_size},
                                                    {"holdout_size", holdout},
                                                    {"final_loss", result.final_loss},
                                                    {"holdout_accuracy", acc}});
    if (t.export_dataset) export_dataset(cfg.paths.output_dir / "dataset", data);

    fmt::print(log, "trained {} classifier on {} images: final loss {:.4f}, held-out accuracy {:.4f} ({} images)\n",
               to_string(t.architecture), train_size, result.final_loss, acc, holdout);
    fmt::print(log, "wrote {} and {}\n", cfg.generator_path().string(), cfg.classifier_path().string());
    return {result.final_loss, acc};
}

void cmd_discover(const RunConfig& cfg, const std::optional<fs::path>& seeds_file,
                  const std::optional<fs::path>& background_file, std::ostream& log) {
    const auto gen = load_generator(cfg);
    const std::size_t d = gen.model.latent_dim();

    std::vector<Vector> seeds;
    std::vector<Vector> background;
    if (seeds_file || background_file) {
        if (!seeds_file || !background_file) {
            throw ConfigError("--seeds and --background must be given together");
        }
        seeds = latents_from_json(read_json(*seeds_file));
        background = latents_from_json(read_json(*background_file));
    } else {
        if (!gen.fixture) throw std::runtime_error("generator has no fixture metadata; pass --seeds and --background");
        const auto axis = gen.fixture->lesion_axis;
        seeds = sample_fixture_latents(d, axis, kFixtureSeedCount, cfg.evaluation.lesion_min,
                                       cfg.evaluation.lesion_max, cfg.seed + kSeedLatents);
        background = sample_fixture_latents(d, axis, kFixtureSeedCount, -2.0, 2.0, cfg.seed + kBackgroundLatents);
    }

    const auto directions = sefa_directions(first_layer_weights(gen.model), d);
    const auto selected = select_attribute(directions, seeds, background);
    const double cos = cosine(selected.direction(), seed_contrast(seeds, background));
    write_json(cfg.attributes_path(), attributes_to_json({directions, selected, cos}));

    fmt::print(log, "rank  eigenvalue      |cos| to seed contrast\n");
    const auto contrast = seed_contrast(seeds, background);
    for (const auto& dir : directions) {
        fmt::print(log, "{:>4}  {:<14.6g}  {:.4f}{}\n", dir.rank(), dir.eigenvalue(),
                   std::abs(cosine(dir.direction(), contrast)), dir.rank() == selected.rank() ? "  <- selected" : "");
    }
    fmt::print(log, "wrote {}\n", cfg.attributes_path().string());
}

ExplainResult cmd_explain(const RunConfig& cfg, const fs::path& query_file, std::ostream& log) {
    const auto gen = load_generator(cfg);
    const auto clf = load_classifier(cfg);
    const auto attrs = load_attributes(cfg);
    require_compatible(gen.model, clf);

    const auto query = query_from_json(read_json(query_file), query_file.stem().string());
    require_safe_id(query.id);
    if (query.latent.dim() != gen.model.latent_dim()) {
        throw std::invalid_argument(fmt::format("query latent has dim {} but generator expects {}", query.latent.dim(),
                                                gen.model.latent_dim()));
    }

    const auto path = build_path(gen.model, clf, query.latent, attrs.selected, cfg.traversal);
    const auto pair = retrieve_contrastives(path);
    const ContrastiveOptions opts{cfg.saliency.diff_normalize_by_alpha, false};
    const auto raw = contrastive_raw(clf, path, opts);
    const auto saliency = mean_threshold(raw);

    const fs::path dir = cfg.paths.output_dir / "explanations" / query.id;
    fs::create_directories(dir);
    json points = json::array();
    for (std::size_t j = 0; j < path.size(); ++j) {
        write_pgm(dir / fmt::format("path_{:03}.pgm", j), path.images[j].shape(), path.images[j].values(), false);
        points.push_back(point_record(path, j));
    }
    write_pgm(dir / "saliency.pgm", saliency.shape(), saliency.values(), true);
    write_overlay(dir / "overlay.ppm", path.query_image(), saliency);

    const auto sentence = explanation_sentence(query.id, path, pair);
    json sal = {{"method", "contrastive"},
                {"image", "saliency.pgm"},
                {"overlay", "overlay.ppm"},
                {"diff_normalize_by_alpha", opts.normalize_by_alpha}};
    if (cfg.saliency.dump_raw) sal["raw"] = raw.storage();

    const json manifest = {
        {"format", "contrex.explanation"},
        {"version", 1},
        {"tool", "contrex"},
        {"tool_version", CONTREX_VERSION},
        {kTimestampField, timestamp_now()},
        {"query_id", query.id},
        {"query_latent", query.latent.storage()},
        {"prediction", {{"score", path.query_score()}, {"label", path.query_score() > 0.5 ? "abnormal" : "normal"}}},
        {"attribute",
         {{"rank", attrs.selected.rank()},
          {"eigenvalue", attrs.selected.eigenvalue()},
          {"direction", attrs.selected.direction().storage()}}},
        {"query_index", path.query_index},
        {"path", std::move(points)},
        {"counterfactual", pair.counterfactual ? point_record(path, *pair.counterfactual) : json(nullptr)},
        {"semifactual", pair.semifactual ? point_record(path, *pair.semifactual) : json(nullptr)},
        {"saliency", std::move(sal)},
        {"explanation", sentence},
        {"config", to_json(cfg, false)},
    };
    write_json(dir / "manifest.json", manifest);

    fmt::print(log, "{}\n", sentence);
    fmt::print(log, "wrote {}\n", (dir / "manifest.json").string());
    return {dir, pair, sentence};
}

void cmd_evaluate(const RunConfig& cfg, const std::optional<fs::path>& queries_file, std::ostream& log) {
    const auto gen = load_generator(cfg);
    const auto clf = load_classifier(cfg);
    const auto attrs = load_attributes(cfg);
    require_compatible(gen.model, clf);

    const auto queries = queries_file ? queries_from_json(read_json(*queries_file)) : fixture_queries(gen, cfg);
    if (queries.empty()) throw std::invalid_argument("evaluate: the query set is empty");

    const SicOptions sic{cfg.metrics.blur_sigma, cfg.metrics.fractions};
    const ContrastiveOptions opts{cfg.saliency.diff_normalize_by_alpha, false};
    const Image black(gen.model.shape(), 0.0);

    std::vector<std::vector<MethodScore>> results;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& q = queries[i];
        if (q.latent.dim() != gen.model.latent_dim()) {
            throw std::invalid_argument(fmt::format("query {} has latent dim {} but generator expects {}", q.id,
                                                    q.latent.dim(), gen.model.latent_dim()));
        }
        const auto path = build_path(gen.model, clf, q.latent, attrs.selected, cfg.traversal);
        const auto pair = retrieve_contrastives(path);
        const Image& x = path.query_image();
        const Image& baseline = pair.counterfactual ? path.images[*pair.counterfactual] : black;

        std::vector<NamedMap> maps;
        maps.push_back({"contrastive", contrastive_saliency(clf, path, opts)});
        maps.push_back({"integrated_gradients", integrated_gradients(clf, x, baseline, cfg.saliency.ig_steps)});
        maps.push_back({"smoothgrad", smoothgrad(clf, x, cfg.saliency.smoothgrad_noise, cfg.saliency.smoothgrad_samples,
                                                 cfg.seed + kSmoothGradBase + i)});
        maps.push_back({"gradient", plain_gradient(clf, x)});
        try {
            results.push_back(compare_methods(clf, x, maps, sic));
            ids.push_back(q.id);
        } catch (const std::domain_error& e) {
            fmt::print(log, "skipping query {}: {}\n", q.id, e.what());
        }
    }
    if (results.empty()) throw std::runtime_error("evaluate: every query was uninformative under blur");

    const fs::path dir = cfg.paths.output_dir / "evaluation";
    std::string curves = "query,method,fraction,normalized_softmax\n";
    std::string aucs = "query,method,auc\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        for (const auto& m : results[i]) {
            aucs += fmt::format("{},{},{}\n", ids[i], m.name, num(m.auc));
            for (const auto& p : m.curve.points) {
                curves += fmt::format("{},{},{},{}\n", ids[i], m.name, num(p.fraction), num(p.normalized_softmax));
            }
        }
    }
    const auto summary = summarize_methods(results);
    std::string median_csv = "method,fraction,median_normalized_softmax\n";
    std::string summary_csv = "method,median_auc\n";
    for (const auto& s : summary) {
        for (const auto& p : s.median_curve) {
            median_csv += fmt::format("{},{},{}\n", s.name, num(p.fraction), num(p.normalized_softmax));
        }
        summary_csv += fmt::format("{},{}\n", s.name, num(s.median_auc));
    }
    write_file_atomic(dir / "sic_curves.csv", curves);
    write_file_atomic(dir / "sic_auc.csv", aucs);
    write_file_atomic(dir / "sic_median.csv", median_csv);
    write_file_atomic(dir / "sic_summary.csv", summary_csv);

    fmt::print(log, "SIC over {} queries\n", results.size());
    fmt::print(log, "{:<22} median AUC\n", "method");
    for (const auto& s : summary) fmt::print(log, "{:<22} {:.4f}\n", s.name, s.median_auc);
    fmt::print(log, "wrote {}\n", dir.string());
}

void cmd_demo(const RunConfig& config, std::ostream& log) {
    RunConfig cfg = config;
    cfg.training.export_dataset = true;

    fmt::print(log, "== train\n");
    cmd_train(cfg, log);
    fmt::print(log, "== discover\n");
    cmd_discover(cfg, std::nullopt, std::nullopt, log);

    // A strong, a borderline and an already-normal query.
    const double levels[] = {26.0, 14.0, 2.0};
    const auto axis = cfg.training.lesion_axis;
    for (std::size_t i = 0; i < std::size(levels); ++i) {
        const auto latent = sample_fixture_latents(cfg.geometry.latent_dim, axis, 1, levels[i], levels[i],
                                                   cfg.seed + kDemoQueries + i)
                                .front();
        const auto file = cfg.paths.output_dir / "queries" / fmt::format("q{:03}.json", i);
        write_json(file, query_to_json({fmt::format("q{:03}", i), latent}));
        fmt::print(log, "== explain {}\n", file.filename().string());
        cmd_explain(cfg, file, log);
    }
    fmt::print(log, "== evaluate\n");
    cmd_evaluate(cfg, std::nullopt, log);
}

}  // namespace contrex::app
