// contrex: counterfactual / semifactual explanations and saliency along
// latent attribute paths.
//
//   contrex train    [--config f] [--seed n] [--out dir]
//   contrex discover [--seeds f --background f]
//   contrex explain  --query f [--dump-raw] [--diff-normalize-by-alpha]
//   contrex evaluate [--queries f]
//   contrex demo
//
// Exit codes: 0 success, 1 runtime error, 2 configuration error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "contrex/app/commands.hpp"
#include "contrex/app/config.hpp"

namespace app = contrex::app;

int main(int argc, char** argv) {
    CLI::App cli{"Contrastive explanations along latent attribute paths"};
    cli.set_version_flag("--version", CONTREX_VERSION);
    cli.require_subcommand(1);
    cli.fallthrough();  // global flags may follow the subcommand: `contrex demo --seed 7`

    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    cli.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
    cli.add_option("--seed", seed, "Run seed (overrides the config)");
    cli.add_option("--out", out_dir, "Output directory (overrides the config)");

    bool dump_raw = false;
    bool normalize_by_alpha = false;
    auto add_saliency_flags = [&](CLI::App* sub) {
        sub->add_flag("--dump-raw", dump_raw, "Store raw saliency values in manifests");
        sub->add_flag("--diff-normalize-by-alpha", normalize_by_alpha,
                      "Divide each difference map by its |alpha| step");
    };

    auto* train = cli.add_subcommand("train", "Train the classifier and build the fixture generator");
    auto* discover = cli.add_subcommand("discover", "Find attribute directions and select the seed-matching one");
    std::string seeds_file;
    std::string background_file;
    discover->add_option("--seeds", seeds_file, "JSON list of seed latents")->check(CLI::ExistingFile);
    discover->add_option("--background", background_file, "JSON list of background latents")
        ->check(CLI::ExistingFile);

    auto* explain = cli.add_subcommand("explain", "Explain one query latent");
    std::string query_file;
    explain->add_option("--query", query_file, "JSON query latent")->required()->check(CLI::ExistingFile);
    add_saliency_flags(explain);

    auto* evaluate = cli.add_subcommand("evaluate", "SIC evaluation of saliency methods over a query set");
    std::string queries_file;
    evaluate->add_option("--queries", queries_file, "JSON query set (default: fixture queries)")
        ->check(CLI::ExistingFile);
    add_saliency_flags(evaluate);

    auto* demo = cli.add_subcommand("demo", "Run train, discover, explain and evaluate end to end");
    add_saliency_flags(demo);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return 2;
    }

    try {
        app::RunConfig cfg = config_file.empty() ? app::RunConfig{} : app::load_config(config_file);
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.paths.output_dir = out_dir;
        cfg.saliency.dump_raw = cfg.saliency.dump_raw || dump_raw;
        cfg.saliency.diff_normalize_by_alpha = cfg.saliency.diff_normalize_by_alpha || normalize_by_alpha;
        app::validate(cfg);

        auto optional_path = [](const std::string& s) {
            return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
        };
        if (*train) {
            app::cmd_train(cfg, std::cout);
        } else if (*discover) {
            app::cmd_discover(cfg, optional_path(seeds_file), optional_path(background_file), std::cout);
        } else if (*explain) {
            app::cmd_explain(cfg, query_file, std::cout);
        } else if (*evaluate) {
            app::cmd_evaluate(cfg, optional_path(queries_file), std::cout);
        } else if (*demo) {
            app::cmd_demo(cfg, std::cout);
        }
    } catch (const app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
