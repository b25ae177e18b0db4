#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forl/agent/episode.hpp"
#include "forl/series/series.hpp"

namespace forl::eval {

/// Statistics of ||s_t - est_t||_2 over every step of every episode.
struct ErrorStats {
    double mean = 0.0;
    /// Population standard deviation.
    double std = 0.0;
    double max = 0.0;
    double min = 0.0;
    std::size_t steps = 0;
};

ErrorStats l2_error_stats(const std::vector<agent::EpisodeLog>& logs);

/// Per-step errors of all episodes, in order.
std::vector<double> step_errors(const std::vector<agent::EpisodeLog>& logs);
/// Mean step error of each episode.
std::vector<double> episode_errors(const std::vector<agent::EpisodeLog>& logs);
std::vector<double> episode_scores(const std::vector<agent::EpisodeLog>& logs);

/// I_x(a, b) by the Lentz continued fraction, evaluated directly for
/// x < (a + 1) / (a + b + 2) and through I_x(a, b) = 1 - I_{1-x}(b, a) otherwise.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) of Student's t with `dof` degrees
/// of freedom: I_{dof / (dof + t^2)}(dof / 2, 1 / 2).
double student_t_two_sided_p(double t, double dof);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;
};

/// Welch's unequal-variance t-test of mean(a) against mean(b); dof from the
/// Welch-Satterthwaite formula. Throws std::invalid_argument when a sample has
/// fewer than two values or both sample variances are zero.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Mean and sample standard deviation (n - 1); std is 0 for fewer than two values.
std::pair<double, double> mean_std(std::span<const double> v);

/// Where offsets come from and how episodes are run for one experiment.
struct Experiment {
    const maze::Maze* maze = nullptr;
    const diffusion::DenoiserModel* model = nullptr;
    agent::EvalConfig eval;
    /// A synthetic preset name, or the path of a CSV file whose column d holds
    /// the series of masked dimension d.
    std::string series = "synth-a";
    double alpha = 1.0;
    maze::OffsetMode offset_mode = maze::OffsetMode::per_episode;
    int segment_length = 50;
    /// med+noise / med+dcm std as a fraction of alpha * range per masked dimension.
    double med_std_fraction = 0.1;
    /// Replaces the fitted forecaster when set.
    const forecast::ExternalForecasts* external = nullptr;

    void validate() const;
};

/// Raw series for the masked dimensions: a preset draws `length` values from
/// `seed`, a CSV file is read as is.
std::vector<forl::series::Series> load_series_source(const std::string& source, std::size_t dims, std::size_t length,
                                               std::uint64_t seed);

/// Offset schedule for one seed. Each series is normalized with the
/// statistics of its first C intervals (the forecaster context).
maze::OffsetSchedule make_schedule(const Experiment& ex, std::uint64_t seed);

/// Estimator parameters of `ex` with the med+ std filled in from the maze range.
agent::EstimatorParams estimator_params(const Experiment& ex);

agent::EvalResult run_experiment(const Experiment& ex, agent::EstimatorMode mode, std::uint64_t seed);

/// One row of the summary table: a single (mode, series, seed, alpha) run.
struct RunSummary {
    std::string mode;
    std::string series;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    std::size_t episodes = 0;
    double score_mean = 0.0;
    double score_std = 0.0;
    ErrorStats err;
};

RunSummary summarize(const agent::EvalResult& result, const std::string& series, std::uint64_t seed, double alpha);

/// Header: mode,series,seed,alpha,episodes,score_mean,score_std,err_mean,err_std,err_max,err_min,steps
void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& rows);
std::vector<RunSummary> read_summaries_csv(const std::string& path);

/// Pooled per-episode samples of one mode over all its runs.
struct ModeSamples {
    std::string mode;
    std::vector<double> scores;
    std::vector<double> errors;
};

/// One Welch test of `mode` against `baseline` on one metric ("score" or
/// "error"). Tests that are undefined (zero variance on both sides) keep
/// t, dof and p as NaN.
struct Comparison {
    std::string mode;
    std::string baseline;
    std::string metric;
    std::size_t n = 0;
    std::size_t n_baseline = 0;
    double mean = 0.0;
    double baseline_mean = 0.0;
    WelchResult test;
};

/// Rows for every mode other than the baseline, score first, then error.
std::vector<Comparison> compare_to_baseline(const std::vector<ModeSamples>& modes, const std::string& baseline);

/// Header: mode,baseline,metric,n,n_baseline,mean,baseline_mean,t,dof,p
void write_comparisons_csv(const std::string& path, const std::vector<Comparison>& rows);

struct SweepPoint {
    double alpha = 0.0;
    std::string mode;
    std::size_t runs = 0;
    /// Mean and standard deviation over seeds of the per-run mean score.
    double score_mean = 0.0;
    double score_std = 0.0;
    double err_mean = 0.0;
};

struct SweepResult {
    /// Ascending, without duplicates.
    std::vector<double> grid;
    /// Grid-major, modes in the order given.
    std::vector<SweepPoint> points;
    std::vector<RunSummary> runs;
};

/// Evaluates every (alpha, mode, seed) combination of `base` with its alpha
/// replaced and aggregates the runs per (alpha, mode).
SweepResult alpha_sweep(const Experiment& base, std::vector<double> grid,
                        const std::vector<agent::EstimatorMode>& modes, const std::vector<std::uint64_t>& seeds);

/// Header: alpha,mode,runs,score_mean,score_std,err_mean
void write_sweep_csv(const std::string& path, const SweepResult& sweep);
SweepResult read_sweep_csv(const std::string& path);

enum class PlotKind { bars, lines, histogram };

std::string to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& s);

/// Data behind one figure. Bars use labels/values/errors, lines use `lines`,
/// histograms use `samples` and `bins`.
struct PlotData {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> labels;
    std::vector<double> values;
    std::vector<double> errors;
    struct Line {
        std::string name;
        std::vector<double> x;
        std::vector<double> y;
    };
    std::vector<Line> lines;
    std::vector<std::pair<std::string, std::vector<double>>> samples;
    std::size_t bins = 20;
};

/// Mean score (or mean error when metric == "error") per mode, with the
/// standard deviation over runs as the error bar; modes in order of first appearance.
PlotData bars_from_summaries(const std::vector<RunSummary>& rows, const std::string& metric = "score");
/// Score against alpha, one line per mode.
PlotData lines_from_sweep(const SweepResult& sweep);
/// Per-step error samples of each named run.
PlotData histogram_from_logs(const std::vector<std::pair<std::string, std::vector<agent::EpisodeLog>>>& runs,
                             std::size_t bins = 20);

/// Histogram bin edges: bins + 1 equally spaced values from min to max of all
/// samples (a unit-wide range around the value when all samples are equal).
std::vector<double> histogram_edges(const PlotData& data);

/// Writes the headered CSV to `path` and, when `svg` is set, a standalone SVG
/// rendering next to it (same path with extension .svg). Bars CSV:
/// label,value,error. Lines: series,x,y. Histogram: series,bin_lo,bin_hi,count.
/// Output bytes depend only on the input.
void emit_plot_data(const PlotData& data, PlotKind kind, const std::string& path, bool svg = true);

}  // namespace forl::eval
