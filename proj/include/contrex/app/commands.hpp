#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "contrex/app/config.hpp"
#include "contrex/traversal.hpp"

namespace contrex::app {

struct TrainSummary {
    double final_loss;
    double holdout_accuracy;
};

/// Builds the lesion dataset and planted generator, trains the classifier and
/// writes generator.json / classifier.json / training.json under models/.
TrainSummary cmd_train(const RunConfig& config, std::ostream& log);

/// SeFa over the generator's first-layer weights followed by seed matching.
/// Without explicit seed/background files, fixture latents are drawn from the
/// generator's planted lesion axis.
void cmd_discover(const RunConfig& config, const std::optional<std::filesystem::path>& seeds_file,
                  const std::optional<std::filesystem::path>& background_file, std::ostream& log);

struct ExplainResult {
    std::filesystem::path directory;
    ContrastivePair contrastives;
    std::string sentence;
};

/// Writes path images, saliency map, overlay and manifest.json into
/// explanations/<query id>/ and prints the explanation sentence.
ExplainResult cmd_explain(const RunConfig& config, const std::filesystem::path& query_file, std::ostream& log);

/// SIC curves for contrastive, integrated-gradients, SmoothGrad and plain
/// gradient maps over a query set, written under evaluation/.
void cmd_evaluate(const RunConfig& config, const std::optional<std::filesystem::path>& queries_file,
                  std::ostream& log);

/// train → discover → explain (three fixture queries) → evaluate.
void cmd_demo(const RunConfig& config, std::ostream& log);

/// Manifest field carrying the wall-clock time of the run; the only
/// non-deterministic field in any output.
inline constexpr const char* kTimestampField = "generated_at";

}  // namespace contrex::app
