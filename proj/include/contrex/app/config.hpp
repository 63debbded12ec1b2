#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contrex/metrics.hpp"
#include "contrex/models.hpp"
#include "contrex/synthetic.hpp"
#include "contrex/traversal.hpp"

namespace contrex::app {

/// Invalid or unreadable run configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainingConfig {
    Architecture architecture = Architecture::logistic;
    std::size_t hidden_width = 16;
    std::size_t epochs = 40;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t dataset_size = 500;
    double holdout_fraction = 0.2;
    std::size_t lesion_axis = 0;
    bool export_dataset = false;
};

struct SaliencyConfig {
    bool diff_normalize_by_alpha = false;
    bool dump_raw = false;
    std::size_t ig_steps = 64;
    std::size_t smoothgrad_samples = 16;
    double smoothgrad_noise = 0.1;
};

struct MetricsConfig {
    double blur_sigma = 8.0;
    std::vector<double> fractions = SicOptions::default_fractions();
};

struct EvaluationConfig {
    std::size_t queries = 50;
    double lesion_min = 20.0;
    double lesion_max = 28.0;
};

struct PathsConfig {
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> generator;
    std::optional<std::filesystem::path> classifier;
    std::optional<std::filesystem::path> attributes;
};

struct RunConfig {
    Geometry geometry;
    TraversalRange traversal;
    TrainingConfig training;
    SaliencyConfig saliency;
    MetricsConfig metrics;
    EvaluationConfig evaluation;
    std::uint64_t seed = 7;
    PathsConfig paths;

    std::filesystem::path models_dir() const { return paths.output_dir / "models"; }
    std::filesystem::path generator_path() const;
    std::filesystem::path classifier_path() const;
    std::filesystem::path attributes_path() const;
};

/// Parses a config document. Every key is optional; unknown keys, wrong
/// types and out-of-range values raise ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& file);
/// Checks cross-field constraints; throws ConfigError.
void validate(const RunConfig& config);

/// Serializes the config. Paths are left out when `include_paths` is false,
/// which keeps manifests independent of where a run was written.
nlohmann::json to_json(const RunConfig& config, bool include_paths = true);

}  // namespace contrex::app
