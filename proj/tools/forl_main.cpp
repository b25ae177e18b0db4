#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forl/cli/commands.hpp"
#include "forl/cli/config.hpp"

namespace {

/// Flags shared by every subcommand; unset flags leave the config untouched.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string out;
    std::vector<std::string> modes;
    std::optional<double> alpha;
    std::vector<std::string> series;
    std::string maze;
    std::string dataset;
    std::string checkpoint;
    std::optional<std::size_t> steps;
    std::string baseline;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON run config; flags override its fields");
    cmd->add_option("--seed", o.seed, "Single seed replacing the config's seed list");
    cmd->add_option("--jobs", o.jobs, "Worker threads for episodes within a block");
    cmd->add_option("--out", o.out, "Output root directory (plot: output directory)");
    cmd->add_option("--mode", o.modes, "Estimator modes (comma separated or repeated)")->delimiter(',');
    cmd->add_option("--alpha", o.alpha, "Offset scale alpha");
    cmd->add_option("--series", o.series, "Series presets or CSV paths (comma separated or repeated)")->delimiter(',');
    cmd->add_option("--maze", o.maze, "Bundled maze name or maze file path");
    cmd->add_option("--dataset", o.dataset, "Dataset JSONL for train");
    cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint for eval/sweep (train: resume source)");
    cmd->add_option("--steps", o.steps, "Training steps");
    cmd->add_option("--baseline", o.baseline, "Baseline mode of the comparison table");
}

forl::cli::RunConfig build_config(const Overrides& o, bool keep_out) {
    forl::cli::RunConfig c = o.config.empty() ? forl::cli::RunConfig{} : forl::cli::load_config(o.config);
    if (o.seed) c.seeds = {*o.seed};
    if (o.jobs) c.jobs = *o.jobs;
    if (!o.out.empty() && keep_out) c.out = o.out;
    if (!o.modes.empty()) c.modes = o.modes;
    if (o.alpha) c.alpha = *o.alpha;
    if (!o.series.empty()) c.series = o.series;
    if (!o.maze.empty()) c.maze = o.maze;
    if (!o.dataset.empty()) c.dataset = o.dataset;
    if (!o.checkpoint.empty()) c.checkpoint = o.checkpoint;
    if (o.steps) c.train.steps = *o.steps;
    if (!o.baseline.empty()) c.baseline = o.baseline;
    if (!o.modes.empty() && o.baseline.empty() &&
        std::find(c.modes.begin(), c.modes.end(), c.baseline) == c.modes.end()) {
        c.baseline = c.modes.front();
    }
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offset-robust state estimation pipeline: data, training, evaluation, sweeps and plots"};
    app.require_subcommand(1);
    Overrides o;
    bool resume = false;
    std::vector<std::string> inputs;
    std::string kind = "bars";
    std::string metric = "score";

    auto* gen = app.add_subcommand("gen-data", "Generate the offset-free expert dataset (JSONL)");
    auto* train = app.add_subcommand("train", "Train the diffusion state estimator");
    auto* evalc = app.add_subcommand("eval", "Evaluate estimator modes under hidden offsets");
    auto* sweep = app.add_subcommand("sweep", "Evaluate modes over a grid of offset scales");
    auto* plot = app.add_subcommand("plot", "Render plot data (CSV + SVG) from earlier outputs");
    for (auto* cmd : {gen, train, evalc, sweep, plot}) add_common(cmd, o);
    train->add_flag("--resume", resume, "Continue training from the checkpoint's optimizer state");
    plot->add_option("--input", inputs, "Input CSV/JSONL files")->delimiter(',');
    plot->add_option("--kind", kind, "bars | lines | histogram");
    plot->add_option("--metric", metric, "bars metric: score | error");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::string dir;
        if (*plot) {
            const auto c = build_config(o, false);
            dir = forl::cli::cmd_plot(c, inputs, kind, metric, o.out, std::cerr);
        } else {
            const auto c = build_config(o, true);
            if (*gen) dir = forl::cli::cmd_gen_data(c, std::cerr);
            if (*train) dir = forl::cli::cmd_train(c, resume, std::cerr);
            if (*evalc) dir = forl::cli::cmd_eval(c, std::cerr);
            if (*sweep) dir = forl::cli::cmd_sweep(c, std::cerr);
        }
        std::cout << dir << "\n";
        return 0;
    } catch (const forl::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
