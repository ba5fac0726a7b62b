// parascope: residual-stream decoding pipeline driver.
//
// Every subcommand is one resumable pipeline stage operating on the run
// directory named by the config file. Rerunning a stage skips work whose
// output rows already exist; --no-resume rebuilds the stage from scratch.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "parascope/commands.hpp"
#include "parascope/config.hpp"
#include "parascope/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"parascope: paragraph-boundary activation decoding pipeline"};
    app.require_subcommand(1);

    std::string config_path = "configs/desk.json";
    std::optional<int64_t> seed_override;
    std::optional<int> workers_override;
    parascope::CommandOptions opts;

    app.add_option("--config", config_path, "Run configuration file")
        ->capture_default_str();
    app.add_option("--seed", seed_override, "Override the config seed");
    app.add_option("--workers", workers_override, "Override the config worker count");
    app.add_flag("--resume,!--no-resume", opts.resume,
                 "Skip work already present in stage outputs (default on)");
    app.add_option("--limit", opts.limit, "Cap the records a stage touches (negative = all)");

    struct Sub {
        const char* name;
        const char* help;
        bool takes_kind;
        const char* kind_help;
    };
    const Sub subs[] = {
        {"prompts", "Synthesize writing prompts from the seed corpus", false, ""},
        {"generate", "Run the subject model over the prompt list", false, ""},
        {"outline", "Summarize each generation into a numbered outline", false, ""},
        {"capture", "Capture boundary activations, features and targets", false, ""},
        {"stats", "Accumulate feature normalization statistics", false, ""},
        {"train-map", "Train a linear feature-to-embedding map", true, "paragraph|outline"},
        {"decode", "Decode predicted text from stored activations", true, "continuation|tae"},
        {"baseline", "Run the baseline ladder", true,
         "blind|cheat-k|regen|autodecode (omit for all)"},
        {"score", "Score decodes and baselines against references", false, ""},
        {"judge", "Run rubric judging over decodes and baselines", false, ""},
        {"scrub", "Layer-scrubbing hybrid sweep", false, ""},
        {"tokenwise", "Per-position decode sweep around the boundary", false, ""},
        {"replace-sweep", "Boundary-token injection sweep", false, ""},
        {"report", "Aggregate scores and judgments into tables and plots", false, ""},
    };

    std::string chosen, kind;
    for (const Sub& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->fallthrough();  // global flags may follow the subcommand
        if (sub.takes_kind) {
            auto* opt = cmd->add_option("kind", kind, sub.kind_help);
            if (std::string(sub.name) != "baseline") opt->required();
        }
        cmd->callback([&chosen, name = std::string(sub.name)] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        parascope::RunConfig config = parascope::load_config(config_path);
        if (seed_override) config.seed = static_cast<uint64_t>(*seed_override);
        if (workers_override) config.workers = *workers_override;
        parascope::run_command(chosen, kind, config, opts);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
