#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "forl/eval/eval.hpp"
#include "format.hpp"

namespace forl::eval {

using detail::fmt;

namespace {

bool is_preset(const std::string& name) {
    const auto& presets = series::synth_presets();
    return std::any_of(presets.begin(), presets.end(), [&](const auto& p) { return p.name == name; });
}

/// True when the first data line of a CSV file starts with a non-numeric cell.
bool first_row_is_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file '" + path + "'");
    for (std::string line; std::getline(in, line);) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const std::string cell = line.substr(b, line.find(',', b) - b);
        char* end = nullptr;
        std::strtod(cell.c_str(), &end);
        return end == cell.c_str();
    }
    return false;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    return cells;
}

/// Rows of a headered CSV after checking the header matches `expected`.
std::vector<std::vector<std::string>> read_table(const std::string& path, const std::string& expected) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != expected) {
        throw std::runtime_error(path + ": unexpected header, want '" + expected + "'");
    }
    const std::size_t width = split_csv_line(expected).size();
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != width) throw std::runtime_error(path + ": malformed row '" + line + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

double to_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    return std::stod(s);
}

const char* kSummaryHeader = "mode,series,seed,alpha,episodes,score_mean,score_std,err_mean,err_std,err_max,err_min,steps";
const char* kSweepHeader = "alpha,mode,runs,score_mean,score_std,err_mean";

}  // namespace

void Experiment::validate() const {
    if (maze == nullptr) throw std::invalid_argument("experiment: no maze");
    if (!(alpha >= 0.0)) throw std::invalid_argument("experiment: alpha_scale must be >= 0");
    if (segment_length < 1) throw std::invalid_argument("experiment: segment length must be >= 1");
    if (!(med_std_fraction >= 0.0)) throw std::invalid_argument("experiment: med std fraction must be >= 0");
    if (series.empty()) throw std::invalid_argument("experiment: no series source");
    eval.validate();
}

std::vector<forl::series::Series> load_series_source(const std::string& source, std::size_t dims, std::size_t length,
                                               std::uint64_t seed) {
    if (is_preset(source)) return series::generate_preset(source, dims, length, seed);
    const bool header = first_row_is_header(source);
    std::vector<forl::series::Series> out;
    for (std::size_t d = 0; d < dims; ++d) {
        series::CsvOptions opt;
        opt.column_index = d;
        opt.header = header;
        out.push_back(series::load_series_csv(source, opt));
    }
    return out;
}

maze::OffsetSchedule make_schedule(const Experiment& ex, std::uint64_t seed) {
    ex.validate();
    const auto& mask = ex.eval.estimator.mask;
    const int max_steps = ex.maze->params().max_steps;
    const std::size_t segs = ex.offset_mode == maze::OffsetMode::per_episode
                                 ? 1
                                 : static_cast<std::size_t>((max_steps + ex.segment_length - 1) / ex.segment_length);
    const std::size_t needed = ex.eval.episodes_needed();
    const auto raw = load_series_source(ex.series, mask.size(), needed * segs, seed);
    std::vector<std::vector<double>> norm;
    std::size_t available = needed;
    for (const auto& s : raw) {
        norm.push_back(series::normalize(s, ex.eval.context * segs).values);
        available = std::min(available, s.size() / segs);
    }
    return maze::build_offset_schedule(norm, ex.maze->state_range(), ex.alpha, ex.offset_mode, available, mask,
                                       ex.segment_length, max_steps);
}

agent::EstimatorParams estimator_params(const Experiment& ex) {
    auto p = ex.eval.estimator;
    const auto range = ex.maze->state_range();
    p.med_std = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t d : p.mask) p.med_std[d] = ex.med_std_fraction * ex.alpha * range[d];
    return p;
}

agent::EvalResult run_experiment(const Experiment& ex, agent::EstimatorMode mode, std::uint64_t seed) {
    const auto schedule = make_schedule(ex, seed);
    auto cfg = ex.eval;
    cfg.seed = seed;
    cfg.estimator = estimator_params(ex);
    return agent::run_eval_block(*ex.maze, schedule, ex.model, mode, cfg, ex.external);
}

RunSummary summarize(const agent::EvalResult& result, const std::string& series, std::uint64_t seed, double alpha) {
    RunSummary r;
    r.mode = agent::to_string(result.mode);
    r.series = series;
    r.seed = seed;
    r.alpha = alpha;
    r.episodes = result.episodes.size();
    const auto scores = episode_scores(result.episodes);
    std::tie(r.score_mean, r.score_std) = mean_std(scores);
    r.err = l2_error_stats(result.episodes);
    return r;
}

void write_summaries_csv(const std::string& path, const std::vector<RunSummary>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        out << r.mode << ',' << r.series << ',' << r.seed << ',' << fmt(r.alpha) << ',' << r.episodes << ','
            << fmt(r.score_mean) << ',' << fmt(r.score_std) << ',' << fmt(r.err.mean) << ',' << fmt(r.err.std) << ','
            << fmt(r.err.max) << ',' << fmt(r.err.min) << ',' << r.err.steps << '\n';
    }
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

std::vector<RunSummary> read_summaries_csv(const std::string& path) {
    std::vector<RunSummary> out;
    for (const auto& c : read_table(path, kSummaryHeader)) {
        RunSummary r;
        r.mode = c[0];
        r.series = c[1];
        r.seed = std::stoull(c[2]);
        r.alpha = to_double(c[3]);
        r.episodes = std::stoul(c[4]);
        r.score_mean = to_double(c[5]);
        r.score_std = to_double(c[6]);
        r.err.mean = to_double(c[7]);
        r.err.std = to_double(c[8]);
        r.err.max = to_double(c[9]);
        r.err.min = to_double(c[10]);
        r.err.steps = std::stoul(c[11]);
        out.push_back(r);
    }
    return out;
}

void write_comparisons_csv(const std::string& path, const std::vector<Comparison>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "mode,baseline,metric,n,n_baseline,mean,baseline_mean,t,dof,p\n";
    for (const auto& r : rows) {
        out << r.mode << ',' << r.baseline << ',' << r.metric << ',' << r.n << ',' << r.n_baseline << ','
            << fmt(r.mean) << ',' << fmt(r.baseline_mean) << ',' << fmt(r.test.t) << ',' << fmt(r.test.dof) << ','
            << fmt(r.test.p) << '\n';
    }
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

SweepResult alpha_sweep(const Experiment& base, std::vector<double> grid,
                        const std::vector<agent::EstimatorMode>& modes, const std::vector<std::uint64_t>& seeds) {
    if (grid.empty()) throw std::invalid_argument("alpha_sweep: empty grid");
    if (modes.empty() || seeds.empty()) throw std::invalid_argument("alpha_sweep: need at least one mode and seed");
    for (double a : grid) {
        if (!(a >= 0.0)) throw std::invalid_argument("alpha_sweep: grid values must be >= 0");
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    SweepResult out;
    out.grid = grid;
    for (double alpha : grid) {
        Experiment ex = base;
        ex.alpha = alpha;
        for (auto mode : modes) {
            std::vector<double> run_scores;
            double err_sum = 0.0;
            for (auto seed : seeds) {
                const auto res = run_experiment(ex, mode, seed);
                out.runs.push_back(summarize(res, ex.series, seed, alpha));
                run_scores.push_back(out.runs.back().score_mean);
                err_sum += out.runs.back().err.mean;
            }
            SweepPoint p;
            p.alpha = alpha;
            p.mode = agent::to_string(mode);
            p.runs = seeds.size();
            std::tie(p.score_mean, p.score_std) = mean_std(run_scores);
            p.err_mean = err_sum / static_cast<double>(seeds.size());
            out.points.push_back(p);
        }
    }
    return out;
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << kSweepHeader << '\n';
    for (const auto& p : sweep.points) {
        out << fmt(p.alpha) << ',' << p.mode << ',' << p.runs << ',' << fmt(p.score_mean) << ','
            << fmt(p.score_std) << ',' << fmt(p.err_mean) << '\n';
    }
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

SweepResult read_sweep_csv(const std::string& path) {
    SweepResult out;
    for (const auto& c : read_table(path, kSweepHeader)) {
        SweepPoint p;
        p.alpha = to_double(c[0]);
        p.mode = c[1];
        p.runs = std::stoul(c[2]);
        p.score_mean = to_double(c[3]);
        p.score_std = to_double(c[4]);
        p.err_mean = to_double(c[5]);
        out.points.push_back(p);
        if (out.grid.empty() || out.grid.back() != p.alpha) out.grid.push_back(p.alpha);
    }
    if (!std::is_sorted(out.grid.begin(), out.grid.end())) throw std::runtime_error(path + ": alpha grid not sorted");
    return out;
}

}  // namespace forl::eval
