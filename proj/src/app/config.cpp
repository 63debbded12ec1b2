#include "contrex/app/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include <fmt/format.h>

namespace contrex::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", section));
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto key : allowed) known = known || item.key() == key;
        if (!known) throw ConfigError(fmt::format("unknown config key '{}{}'", section, item.key()));
    }
}

template <class T>
void read(const json& obj, const char* key, T& target, std::string_view section) {
    if (!obj.contains(key)) return;
    try {
        const auto& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) throw ConfigError("expected a nonnegative integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("expected a number");
        }
        target = v.get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(fmt::format("config key '{}{}': {}", section, key, e.what()));
    }
}

void read_path(const json& obj, const char* key, std::optional<std::filesystem::path>& target) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    if (!obj.at(key).is_string()) throw ConfigError(fmt::format("config key 'paths.{}' must be a string", key));
    target = obj.at(key).get<std::string>();
}

void require(bool ok, std::string_view message) {
    if (!ok) throw ConfigError(std::string(message));
}

}  // namespace

std::filesystem::path RunConfig::generator_path() const {
    return paths.generator.value_or(models_dir() / "generator.json");
}

std::filesystem::path RunConfig::classifier_path() const {
    return paths.classifier.value_or(models_dir() / "classifier.json");
}

std::filesystem::path RunConfig::attributes_path() const {
    return paths.attributes.value_or(models_dir() / "attributes.json");
}

RunConfig config_from_json(const json& doc) {
    RunConfig cfg;
    reject_unknown(doc, "",
                   {"geometry", "traversal", "training", "saliency", "metrics", "evaluation", "seed", "paths"});
    read(doc, "seed", cfg.seed, "");

    if (doc.contains("geometry")) {
        const auto& g = doc.at("geometry");
        reject_unknown(g, "geometry.", {"height", "width", "latent_dim"});
        read(g, "height", cfg.geometry.height, "geometry.");
        read(g, "width", cfg.geometry.width, "geometry.");
        read(g, "latent_dim", cfg.geometry.latent_dim, "geometry.");
    }
    if (doc.contains("traversal")) {
        const auto& t = doc.at("traversal");
        reject_unknown(t, "traversal.", {"alpha_min", "alpha_max", "steps"});
        read(t, "alpha_min", cfg.traversal.alpha_min, "traversal.");
        read(t, "alpha_max", cfg.traversal.alpha_max, "traversal.");
        read(t, "steps", cfg.traversal.steps, "traversal.");
    }
    if (doc.contains("training")) {
        const auto& t = doc.at("training");
        reject_unknown(t, "training.",
                       {"architecture", "hidden_width", "epochs", "learning_rate", "batch_size", "dataset_size",
                        "holdout_fraction", "lesion_axis", "export_dataset"});
        if (t.contains("architecture")) {
            std::string arch;
            read(t, "architecture", arch, "training.");
            try {
                cfg.training.architecture = architecture_from_string(arch);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        read(t, "hidden_width", cfg.training.hidden_width, "training.");
        read(t, "epochs", cfg.training.epochs, "training.");
        read(t, "learning_rate", cfg.training.learning_rate, "training.");
        read(t, "batch_size", cfg.training.batch_size, "training.");
        read(t, "dataset_size", cfg.training.dataset_size, "training.");
        read(t, "holdout_fraction", cfg.training.holdout_fraction, "training.");
        read(t, "lesion_axis", cfg.training.lesion_axis, "training.");
        read(t, "export_dataset", cfg.training.export_dataset, "training.");
    }
    if (doc.contains("saliency")) {
        const auto& s = doc.at("saliency");
        reject_unknown(s, "saliency.",
                       {"diff_normalize_by_alpha", "dump_raw", "ig_steps", "smoothgrad_samples", "smoothgrad_noise"});
        read(s, "diff_normalize_by_alpha", cfg.saliency.diff_normalize_by_alpha, "saliency.");
        read(s, "dump_raw", cfg.saliency.dump_raw, "saliency.");
        read(s, "ig_steps", cfg.saliency.ig_steps, "saliency.");
        read(s, "smoothgrad_samples", cfg.saliency.smoothgrad_samples, "saliency.");
        read(s, "smoothgrad_noise", cfg.saliency.smoothgrad_noise, "saliency.");
    }
    if (doc.contains("metrics")) {
        const auto& m = doc.at("metrics");
        reject_unknown(m, "metrics.", {"blur_sigma", "fractions"});
        read(m, "blur_sigma", cfg.metrics.blur_sigma, "metrics.");
        if (m.contains("fractions")) {
            const auto& f = m.at("fractions");
            if (!f.is_array()) throw ConfigError("config key 'metrics.fractions' must be an array");
            cfg.metrics.fractions.clear();
            for (const auto& v : f) {
                if (!v.is_number()) throw ConfigError("config key 'metrics.fractions' must hold numbers");
                cfg.metrics.fractions.push_back(v.get<double>());
            }
        }
    }
    if (doc.contains("evaluation")) {
        const auto& e = doc.at("evaluation");
        reject_unknown(e, "evaluation.", {"queries", "lesion_min", "lesion_max"});
        read(e, "queries", cfg.evaluation.queries, "evaluation.");
        read(e, "lesion_min", cfg.evaluation.lesion_min, "evaluation.");
        read(e, "lesion_max", cfg.evaluation.lesion_max, "evaluation.");
    }
    if (doc.contains("paths")) {
        const auto& p = doc.at("paths");
        reject_unknown(p, "paths.", {"output_dir", "generator", "classifier", "attributes"});
        std::optional<std::filesystem::path> out;
        read_path(p, "output_dir", out);
        if (out) cfg.paths.output_dir = *out;
        read_path(p, "generator", cfg.paths.generator);
        read_path(p, "classifier", cfg.paths.classifier);
        read_path(p, "attributes", cfg.paths.attributes);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", file.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", file.string(), e.what()));
    }
    return config_from_json(doc);
}

void validate(const RunConfig& c) {
    require(c.geometry.height >= 8 && c.geometry.width >= 8, "geometry.height and geometry.width must be >= 8");
    require(c.geometry.latent_dim >= 1, "geometry.latent_dim must be >= 1");
    require(c.traversal.alpha_min < c.traversal.alpha_max, "traversal.alpha_min must be < traversal.alpha_max");
    require(c.traversal.steps >= 2, "traversal.steps must be >= 2");
    require(c.training.lesion_axis < c.geometry.latent_dim, "training.lesion_axis must be < geometry.latent_dim");
    require(c.training.dataset_size >= 4, "training.dataset_size must be >= 4");
    require(c.training.holdout_fraction > 0.0 && c.training.holdout_fraction < 1.0,
            "training.holdout_fraction must lie in (0,1)");
    require(c.training.learning_rate > 0.0, "training.learning_rate must be > 0");
    require(c.training.batch_size >= 1, "training.batch_size must be >= 1");
    require(c.training.architecture == Architecture::logistic || c.training.hidden_width >= 1,
            "training.hidden_width must be >= 1 for mlp");
    require(c.saliency.ig_steps >= 1, "saliency.ig_steps must be >= 1");
    require(c.saliency.smoothgrad_samples >= 1, "saliency.smoothgrad_samples must be >= 1");
    require(c.saliency.smoothgrad_noise >= 0.0, "saliency.smoothgrad_noise must be >= 0");
    require(c.metrics.blur_sigma > 0.0, "metrics.blur_sigma must be > 0");
    const auto& f = c.metrics.fractions;
    require(f.size() >= 2 && f.front() == 0.0 && f.back() == 1.0, "metrics.fractions must start at 0 and end at 1");
    for (std::size_t i = 1; i < f.size(); ++i) require(f[i] > f[i - 1], "metrics.fractions must be strictly ascending");
    require(c.evaluation.lesion_min <= c.evaluation.lesion_max, "evaluation.lesion_min must be <= lesion_max");
    require(!c.paths.output_dir.empty(), "paths.output_dir must not be empty");
}

json to_json(const RunConfig& c, bool include_paths) {
    json doc = {
        {"seed", c.seed},
        {"geometry", {{"height", c.geometry.height}, {"width", c.geometry.width}, {"latent_dim", c.geometry.latent_dim}}},
        {"traversal",
         {{"alpha_min", c.traversal.alpha_min}, {"alpha_max", c.traversal.alpha_max}, {"steps", c.traversal.steps}}},
        {"training",
         {{"architecture", std::string(to_string(c.training.architecture))},
          {"hidden_width", c.training.hidden_width},
          {"epochs", c.training.epochs},
          {"learning_rate", c.training.learning_rate},
          {"batch_size", c.training.batch_size},
          {"dataset_size", c.training.dataset_size},
          {"holdout_fraction", c.training.holdout_fraction},
          {"lesion_axis", c.training.lesion_axis},
          {"export_dataset", c.training.export_dataset}}},
        {"saliency",
         {{"diff_normalize_by_alpha", c.saliency.diff_normalize_by_alpha},
          {"dump_raw", c.saliency.dump_raw},
          {"ig_steps", c.saliency.ig_steps},
          {"smoothgrad_samples", c.saliency.smoothgrad_samples},
          {"smoothgrad_noise", c.saliency.smoothgrad_noise}}},
        {"metrics", {{"blur_sigma", c.metrics.blur_sigma}, {"fractions", c.metrics.fractions}}},
        {"evaluation",
         {{"queries", c.evaluation.queries},
          {"lesion_min", c.evaluation.lesion_min},
          {"lesion_max", c.evaluation.lesion_max}}},
    };
    if (include_paths) {
        json paths = {{"output_dir", c.paths.output_dir.string()}};
        if (c.paths.generator) paths["generator"] = c.paths.generator->string();
        if (c.paths.classifier) paths["classifier"] = c.paths.classifier->string();
        if (c.paths.attributes) paths["attributes"] = c.paths.attributes->string();
        doc["paths"] = std::move(paths);
    }
    return doc;
}

}  // namespace contrex::app
