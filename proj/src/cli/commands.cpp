#include "forl/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include "forl/agent/training.hpp"
#include "forl/forecast/forecast.hpp"

namespace forl::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string prepare_dir(const RunConfig& c, const std::string& command) {
    const auto dir = run_directory(c, command);
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "config.json");
    if (!out) throw std::runtime_error("cannot write into run directory " + dir);
    out << config_to_json(c).dump(2) << '\n';
    return dir;
}

maze::Maze load_maze(const RunConfig& c) {
    return maze::Maze::load(resolve_maze_path(c.maze));
}

/// Preset name, or the file stem of a CSV series.
std::string series_tag(const std::string& series) { return fs::path(series).stem().string(); }

agent::Dataset make_dataset(const RunConfig& c, const maze::Maze& maze, std::ostream& log) {
    num::Rng rng(c.seeds.front(), 0);
    auto opt = c.data;
    opt.gains = c.controller;
    log << "generating " << opt.episodes << " expert episodes on " << c.maze << "\n";
    auto data = agent::generate_dataset(maze, opt, rng);
    data.validate();
    return data;
}

void write_loss_csv(const std::string& path, const std::vector<agent::LossPoint>& kept,
                    const std::vector<agent::LossPoint>& fresh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "step,loss\n";
    char buf[64];
    for (const auto* list : {&kept, &fresh}) {
        for (const auto& p : *list) {
            std::snprintf(buf, sizeof buf, "%llu,%.17g\n", static_cast<unsigned long long>(p.step), p.loss);
            out << buf;
        }
    }
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

/// Rows of an existing loss CSV with step <= `upto`.
std::vector<agent::LossPoint> read_loss_csv(const std::string& path, std::uint64_t upto) {
    std::vector<agent::LossPoint> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const agent::LossPoint p{std::stoull(line.substr(0, comma)), std::stod(line.substr(comma + 1))};
        if (p.step <= upto) out.push_back(p);
    }
    return out;
}

std::optional<diffusion::LoadedCheckpoint> load_model_if_needed(const RunConfig& c,
                                                               const std::vector<agent::EstimatorMode>& modes) {
    bool needed = false;
    for (auto m : modes) needed = needed || agent::needs_model(m);
    if (!needed) return std::nullopt;
    if (c.checkpoint.empty()) throw ConfigError("a checkpoint (--checkpoint) is required for the selected modes");
    auto ck = diffusion::load_checkpoint(c.checkpoint);
    check_checkpoint_matches(c, ck.model);
    return ck;
}

std::vector<agent::EstimatorMode> parse_modes(const RunConfig& c) {
    std::vector<agent::EstimatorMode> out;
    for (const auto& m : c.modes) out.push_back(agent::estimator_mode_from_string(m));
    return out;
}

std::vector<agent::EpisodeLog> read_episode_logs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("input file not found: " + path);
    std::vector<agent::EpisodeLog> logs;
    std::string line;
    std::optional<std::size_t> current;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        const auto ep = j.at("ep").get<std::size_t>();
        if (!current || *current != ep) {
            logs.emplace_back();
            logs.back().episode = ep;
            current = ep;
        }
        agent::StepRecord st;
        st.t = j.at("t").get<int>();
        st.s = j.at("s").get<agent::StateVec>();
        st.est = j.at("est").get<agent::StateVec>();
        logs.back().steps.push_back(st);
    }
    return logs;
}

}  // namespace

std::string cmd_gen_data(const RunConfig& c, std::ostream& log) {
    const auto maze = load_maze(c);
    const auto dir = prepare_dir(c, "gen-data");
    const auto data = make_dataset(c, maze, log);
    agent::write_dataset_jsonl((fs::path(dir) / "dataset.jsonl").string(), data);
    log << "wrote " << data.size() << " transitions in " << data.episodes() << " episodes\n";
    return dir;
}

std::string cmd_train(const RunConfig& c, bool resume, std::ostream& log) {
    const auto maze = load_maze(c);
    const auto dir = prepare_dir(c, "train");
    const auto ck_path = (fs::path(dir) / "checkpoint.json").string();
    const auto loss_path = (fs::path(dir) / "loss.csv").string();
    const auto val_path = (fs::path(dir) / "validation.csv").string();

    agent::Dataset data;
    if (!c.dataset.empty()) {
        data = agent::read_dataset_jsonl(c.dataset);
        data.validate();
    } else {
        data = make_dataset(c, maze, log);
        agent::write_dataset_jsonl((fs::path(dir) / "dataset.jsonl").string(), data);
    }
    log << "dataset: " << data.size() << " transitions\n";

    std::optional<diffusion::DenoiserModel> model;
    diffusion::TrainingState state;
    std::vector<agent::LossPoint> kept_train, kept_val;
    if (resume) {
        const auto from = c.checkpoint.empty() ? ck_path : c.checkpoint;
        if (!fs::is_regular_file(from)) throw ConfigError("no checkpoint to resume from: " + from);
        auto ck = diffusion::load_checkpoint(from);
        if (!ck.training) throw ConfigError("checkpoint " + from + " holds no optimizer state to resume from");
        check_checkpoint_matches(c, ck.model);
        model.emplace(std::move(ck.model));
        state = std::move(*ck.training);
        const auto src_dir = fs::path(from).parent_path();
        if (state.step > 0) kept_train = read_loss_csv((src_dir / "loss.csv").string(), state.step - 1);
        kept_val = read_loss_csv((src_dir / "validation.csv").string(), state.step);
        log << "resuming at step " << state.step << "\n";
    } else {
        num::Rng rng(c.seeds.front(), 1);
        model.emplace(agent::init_model(denoiser_config(c), data, rng, c.observation_scale));
        state = agent::start_training(*model, c.train, c.seeds.front());
    }

    const auto tlog = agent::train_denoiser(*model, data, c.train, state, [&](const agent::LossPoint& p, bool val) {
        if (val || p.step % (c.train.log_every * 10) == 0) {
            log << (val ? "validation" : "step") << ' ' << p.step << " loss " << p.loss << "\n";
        }
    });
    diffusion::save_checkpoint(ck_path, *model, state);
    write_loss_csv(loss_path, kept_train, tlog.train);
    write_loss_csv(val_path, kept_val, tlog.validation);
    return dir;
}

std::string cmd_eval(const RunConfig& c, std::ostream& log) {
    const auto modes = parse_modes(c);
    const auto maze = load_maze(c);
    const auto ck = load_model_if_needed(c, modes);
    std::optional<forecast::ExternalForecasts> external;
    if (!c.external_forecasts.empty()) external = forecast::ExternalForecasts::load_csv(c.external_forecasts);
    const auto dir = prepare_dir(c, "eval");
    fs::create_directories(fs::path(dir) / "logs");

    std::vector<eval::RunSummary> rows;
    std::vector<eval::ModeSamples> samples;
    for (auto mode : modes) samples.push_back({agent::to_string(mode), {}, {}});
    for (const auto& series : c.series) {
        auto ex = make_experiment(c, maze, ck ? &ck->model : nullptr, series);
        if (external) ex.external = &*external;
        const auto tag = series_tag(series);
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
            for (auto seed : c.seeds) {
                const auto res = eval::run_experiment(ex, modes[mi], seed);
                rows.push_back(eval::summarize(res, tag, seed, c.alpha));
                const auto& r = rows.back();
                log << tag << ' ' << r.mode << " seed " << seed << ": score " << r.score_mean << " err "
                    << r.err.mean << "\n";
                const auto sc = eval::episode_scores(res.episodes);
                const auto er = eval::episode_errors(res.episodes);
                samples[mi].scores.insert(samples[mi].scores.end(), sc.begin(), sc.end());
                samples[mi].errors.insert(samples[mi].errors.end(), er.begin(), er.end());
                agent::write_episode_logs_jsonl(
                    (fs::path(dir) / "logs" / (tag + "_" + r.mode + "_s" + std::to_string(seed) + ".jsonl")).string(),
                    res);
            }
        }
    }
    eval::write_summaries_csv((fs::path(dir) / "summary.csv").string(), rows);
    eval::write_comparisons_csv((fs::path(dir) / "comparison.csv").string(),
                                eval::compare_to_baseline(samples, c.baseline));
    return dir;
}

std::string cmd_sweep(const RunConfig& c, std::ostream& log) {
    const auto modes = parse_modes(c);
    const auto maze = load_maze(c);
    const auto ck = load_model_if_needed(c, modes);
    const auto dir = prepare_dir(c, "sweep");
    for (const auto& series : c.series) {
        const auto tag = series_tag(series);
        const auto ex = make_experiment(c, maze, ck ? &ck->model : nullptr, series);
        log << "sweeping " << tag << " over " << c.alpha_grid.size() << " alpha values\n";
        auto sw = eval::alpha_sweep(ex, c.alpha_grid, modes, c.seeds);
        for (auto& r : sw.runs) r.series = tag;
        for (const auto& p : sw.points) {
            log << "  alpha " << p.alpha << ' ' << p.mode << ": score " << p.score_mean << "\n";
        }
        eval::write_sweep_csv((fs::path(dir) / ("sweep_" + tag + ".csv")).string(), sw);
        eval::write_summaries_csv((fs::path(dir) / ("runs_" + tag + ".csv")).string(), sw.runs);
        auto plot = eval::lines_from_sweep(sw);
        plot.title += " (" + tag + ")";
        eval::emit_plot_data(plot, eval::PlotKind::lines, (fs::path(dir) / ("sweep_" + tag + "_lines.csv")).string());
    }
    return dir;
}

std::string cmd_plot(const RunConfig& c, const std::vector<std::string>& inputs, const std::string& kind,
                     const std::string& metric, const std::string& out_dir, std::ostream& log) {
    if (inputs.empty()) throw ConfigError("plot: at least one --input is required");
    for (const auto& in : inputs) {
        if (!fs::is_regular_file(in)) throw ConfigError("input file not found: " + in);
    }
    eval::PlotKind k;
    try {
        k = eval::plot_kind_from_string(kind);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    eval::PlotData data;
    switch (k) {
        case eval::PlotKind::bars: {
            if (metric != "score" && metric != "error") throw ConfigError("plot: metric must be score or error");
            std::vector<eval::RunSummary> rows;
            for (const auto& in : inputs) {
                const auto part = eval::read_summaries_csv(in);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            data = eval::bars_from_summaries(rows, metric);
            break;
        }
        case eval::PlotKind::lines:
            if (inputs.size() != 1) throw ConfigError("plot: lines take exactly one sweep CSV");
            data = eval::lines_from_sweep(eval::read_sweep_csv(inputs.front()));
            break;
        case eval::PlotKind::histogram: {
            std::vector<std::pair<std::string, std::vector<agent::EpisodeLog>>> runs;
            for (const auto& in : inputs) runs.emplace_back(fs::path(in).stem().string(), read_episode_logs(in));
            data = eval::histogram_from_logs(runs, c.plot_bins);
            break;
        }
    }
    const fs::path dir = out_dir.empty() ? fs::path(inputs.front()).parent_path() : fs::path(out_dir);
    if (!dir.empty()) fs::create_directories(dir);
    const auto path = dir / (fs::path(inputs.front()).stem().string() + "_" + kind + ".csv");
    eval::emit_plot_data(data, k, path.string());
    log << "wrote " << path.string() << "\n";
    return dir.string();
}

}  // namespace forl::cli
