#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "forl/cli/config.hpp"

namespace forl::cli {

/// Each command writes its files under run_directory(config, name) (plot
/// writes next to its input or into an explicit directory), prints progress
/// to `log` and returns the directory it wrote to. The first seed drives
/// gen-data and train; eval and sweep run every seed.

/// config.json and dataset.jsonl.
std::string cmd_gen_data(const RunConfig& c, std::ostream& log);

/// config.json, dataset.jsonl (unless config.dataset is set), checkpoint.json
/// with optimizer state, loss.csv and validation.csv (header step,loss). With
/// `resume` training continues from config.checkpoint (or the run's own
/// checkpoint) up to train.steps; the loss rows recorded before the resume
/// point are copied from the loss files next to that checkpoint.
std::string cmd_train(const RunConfig& c, bool resume, std::ostream& log);

/// config.json, summary.csv (one row per series, mode and seed),
/// comparison.csv (Welch tests of every mode against the baseline on
/// per-episode scores and errors pooled over series and seeds) and
/// logs/<series>_<mode>_s<seed>.jsonl with one line per step.
std::string cmd_eval(const RunConfig& c, std::ostream& log);

/// Per series: sweep_<series>.csv (aggregated), runs_<series>.csv (one row
/// per run) and the score-against-alpha plot sweep_<series>_lines.csv/.svg.
std::string cmd_sweep(const RunConfig& c, std::ostream& log);

/// Plot data from earlier outputs: bars from summary CSVs (metric score or
/// error), lines from a sweep CSV, histogram of step errors from episode-log
/// JSONL files. Writes <first input stem>_<kind>.csv and .svg into `out_dir`
/// (the first input's directory when empty) and returns that directory.
std::string cmd_plot(const RunConfig& c, const std::vector<std::string>& inputs, const std::string& kind,
                     const std::string& metric, const std::string& out_dir, std::ostream& log);

}  // namespace forl::cli
