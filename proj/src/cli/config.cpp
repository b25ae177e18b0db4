#include "forl/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "forl/forecast/forecast.hpp"

namespace forl::cli {

using json = nlohmann::json;

namespace {

bool file_exists(const std::string& path) { return std::filesystem::is_regular_file(path); }

bool is_preset(const std::string& name) {
    const auto& presets = series::synth_presets();
    return std::any_of(presets.begin(), presets.end(), [&](const auto& p) { return p.name == name; });
}

/// Copies j[key] into `dst` when present and records the key as known.
template <class T>
void take(const json& j, const char* key, T& dst, std::set<std::string>& known) {
    known.insert(key);
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config field '" + where + it.key() + "'");
    }
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config " + where + " must be a JSON object");
}

}  // namespace

std::string resolve_maze_path(const std::string& maze) {
    const bool looks_like_path = maze.find('/') != std::string::npos || maze.find('.') != std::string::npos;
    const std::string path = looks_like_path ? maze : maze::bundled_maze_path(maze);
    if (!file_exists(path)) throw ConfigError("maze file not found: " + path);
    return path;
}

void RunConfig::validate() const {
    resolve_maze_path(maze);
    if (series.empty()) throw ConfigError("config: at least one series is required");
    for (const auto& s : series) {
        if (!is_preset(s) && !file_exists(s)) throw ConfigError("series '" + s + "' is neither a preset nor a file");
    }
    if (mask.empty() || mask.size() > 4) throw ConfigError("config: mask must list 1 to 4 dimensions");
    std::set<std::size_t> dims(mask.begin(), mask.end());
    if (dims.size() != mask.size() || *dims.rbegin() >= 4) {
        throw ConfigError("config: mask dimensions must be distinct values in 0..3");
    }
    if (!(alpha >= 0.0)) throw ConfigError("config: alpha must be >= 0");
    if (modes.empty()) throw ConfigError("config: at least one mode is required");
    for (const auto& m : modes) {
        try {
            agent::estimator_mode_from_string(m);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (std::find(modes.begin(), modes.end(), baseline) == modes.end()) {
        throw ConfigError("config: baseline mode '" + baseline + "' is not among the modes");
    }
    if (block_episodes < 1) throw ConfigError("config: block_episodes (P) must be >= 1");
    if (context < 4) throw ConfigError("config: context (C) must be >= 4");
    if (blocks < 1) throw ConfigError("config: blocks must be >= 1");
    if (forecast_samples < 1) throw ConfigError("config: forecast_samples (l) must be >= 1");
    if (candidates < 1) throw ConfigError("config: candidates (k) must be >= 1");
    if (window < 1) throw ConfigError("config: window (w) must be >= 1");
    if (diffusion_steps < 1) throw ConfigError("config: diffusion_steps (N) must be >= 1");
    try {
        maze::offset_mode_from_string(offset_mode);
        forecast::method_from_string(forecaster);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (segment_length < 1) throw ConfigError("config: segment_length (f) must be >= 1");
    if (!external_forecasts.empty() && !file_exists(external_forecasts)) {
        throw ConfigError("external forecasts file not found: " + external_forecasts);
    }
    if (alpha_grid.empty()) throw ConfigError("config: alpha_grid must not be empty");
    for (double a : alpha_grid) {
        if (!(a >= 0.0)) throw ConfigError("config: alpha_grid values must be >= 0");
    }
    if (seeds.empty()) throw ConfigError("config: at least one seed is required");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (out.empty()) throw ConfigError("config: out must not be empty");
    if (!dataset.empty() && !file_exists(dataset)) throw ConfigError("dataset file not found: " + dataset);
    if (!checkpoint.empty() && !file_exists(checkpoint)) throw ConfigError("checkpoint file not found: " + checkpoint);
    if (!(med_std_fraction >= 0.0)) throw ConfigError("config: med_std_fraction must be >= 0");
    if (!(controller.cruise_speed > 0.0) || !(controller.kp > 0.0) || !(controller.kv >= 0.0)) {
        throw ConfigError("config: controller gains must be positive");
    }
    if (plot_bins < 1) throw ConfigError("config: plot_bins must be >= 1");
    if (!(observation_scale > 0.0) || !std::isfinite(observation_scale)) {
        throw ConfigError("config: observation_scale must be positive");
    }
    try {
        denoiser_config(*this).validate();
        data.validate();
        train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig config_from_json(const json& j) {
    require_object(j, "root");
    RunConfig c;
    std::set<std::string> known;
    take(j, "maze", c.maze, known);
    take(j, "series", c.series, known);
    take(j, "mask", c.mask, known);
    take(j, "alpha", c.alpha, known);
    take(j, "modes", c.modes, known);
    take(j, "baseline", c.baseline, known);
    take(j, "block_episodes", c.block_episodes, known);
    take(j, "context", c.context, known);
    take(j, "blocks", c.blocks, known);
    take(j, "forecast_samples", c.forecast_samples, known);
    take(j, "candidates", c.candidates, known);
    take(j, "window", c.window, known);
    take(j, "diffusion_steps", c.diffusion_steps, known);
    take(j, "offset_mode", c.offset_mode, known);
    take(j, "segment_length", c.segment_length, known);
    take(j, "forecaster", c.forecaster, known);
    take(j, "external_forecasts", c.external_forecasts, known);
    take(j, "alpha_grid", c.alpha_grid, known);
    take(j, "seeds", c.seeds, known);
    take(j, "jobs", c.jobs, known);
    take(j, "out", c.out, known);
    take(j, "dataset", c.dataset, known);
    take(j, "checkpoint", c.checkpoint, known);
    take(j, "med_std_fraction", c.med_std_fraction, known);
    take(j, "embed_dim", c.embed_dim, known);
    take(j, "observation_scale", c.observation_scale, known);
    take(j, "hidden", c.hidden, known);
    take(j, "plot_bins", c.plot_bins, known);
    known.insert("controller");
    if (j.contains("controller")) {
        const auto& g = j.at("controller");
        require_object(g, "controller");
        std::set<std::string> gk;
        take(g, "cruise_speed", c.controller.cruise_speed, gk);
        take(g, "kp", c.controller.kp, gk);
        take(g, "kv", c.controller.kv, gk);
        reject_unknown(g, gk, "controller.");
    }
    known.insert("data");
    if (j.contains("data")) {
        const auto& d = j.at("data");
        require_object(d, "data");
        std::set<std::string> dk;
        take(d, "episodes", c.data.episodes, dk);
        take(d, "exploration_noise", c.data.exploration_noise, dk);
        take(d, "max_waypoints", c.data.max_waypoints, dk);
        take(d, "waypoint_radius", c.data.waypoint_radius, dk);
        take(d, "belief_offset_fraction", c.data.belief_offset_fraction, dk);
        take(d, "belief_offset_std", c.data.belief_offset_std, dk);
        reject_unknown(d, dk, "data.");
    }
    known.insert("train");
    if (j.contains("train")) {
        const auto& t = j.at("train");
        require_object(t, "train");
        std::set<std::string> tk;
        take(t, "steps", c.train.steps, tk);
        take(t, "batch", c.train.batch, tk);
        take(t, "lr", c.train.lr, tk);
        take(t, "lr_final_fraction", c.train.lr_final_fraction, tk);
        take(t, "log_every", c.train.log_every, tk);
        take(t, "val_every", c.train.val_every, tk);
        take(t, "val_batch", c.train.val_batch, tk);
        reject_unknown(t, tk, "train.");
    }
    reject_unknown(j, known, "");
    c.data.gains = c.controller;
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["maze"] = c.maze;
    j["series"] = c.series;
    j["mask"] = c.mask;
    j["alpha"] = c.alpha;
    j["modes"] = c.modes;
    j["baseline"] = c.baseline;
    j["block_episodes"] = c.block_episodes;
    j["context"] = c.context;
    j["blocks"] = c.blocks;
    j["forecast_samples"] = c.forecast_samples;
    j["candidates"] = c.candidates;
    j["window"] = c.window;
    j["diffusion_steps"] = c.diffusion_steps;
    j["offset_mode"] = c.offset_mode;
    j["segment_length"] = c.segment_length;
    j["forecaster"] = c.forecaster;
    j["external_forecasts"] = c.external_forecasts;
    j["alpha_grid"] = c.alpha_grid;
    j["seeds"] = c.seeds;
    j["jobs"] = c.jobs;
    j["out"] = c.out;
    j["dataset"] = c.dataset;
    j["checkpoint"] = c.checkpoint;
    j["med_std_fraction"] = c.med_std_fraction;
    j["embed_dim"] = c.embed_dim;
    j["observation_scale"] = c.observation_scale;
    j["hidden"] = c.hidden;
    j["plot_bins"] = c.plot_bins;
    j["controller"] = {{"cruise_speed", c.controller.cruise_speed}, {"kp", c.controller.kp}, {"kv", c.controller.kv}};
    j["data"] = {{"episodes", c.data.episodes},
                 {"exploration_noise", c.data.exploration_noise},
                 {"max_waypoints", c.data.max_waypoints},
                 {"waypoint_radius", c.data.waypoint_radius},
                 {"belief_offset_fraction", c.data.belief_offset_fraction},
                 {"belief_offset_std", c.data.belief_offset_std}};
    j["train"] = {{"steps", c.train.steps},       {"batch", c.train.batch},         {"lr", c.train.lr},
                  {"lr_final_fraction", c.train.lr_final_fraction},
                  {"log_every", c.train.log_every}, {"val_every", c.train.val_every}, {"val_batch", c.train.val_batch}};
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    auto c = config_from_json(j);
    c.validate();
    return c;
}

std::string config_hash(const RunConfig& c) {
    auto j = config_to_json(c);
    j.erase("seeds");
    j.erase("jobs");
    j.erase("out");
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string run_directory(const RunConfig& c, const std::string& command) {
    std::string seeds;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) seeds += (i ? "_" : "") + std::to_string(c.seeds[i]);
    return (std::filesystem::path(c.out) / (command + "-" + config_hash(c) + "-s" + seeds)).string();
}

diffusion::DenoiserConfig denoiser_config(const RunConfig& c) {
    diffusion::DenoiserConfig d;
    d.window = c.window;
    d.embed_dim = c.embed_dim;
    d.hidden = c.hidden;
    d.schedule.steps = c.diffusion_steps;
    return d;
}

eval::Experiment make_experiment(const RunConfig& c, const maze::Maze& maze, const diffusion::DenoiserModel* model,
                                 const std::string& series) {
    eval::Experiment ex;
    ex.maze = &maze;
    ex.model = model;
    ex.series = series;
    ex.alpha = c.alpha;
    ex.offset_mode = maze::offset_mode_from_string(c.offset_mode);
    ex.segment_length = c.segment_length;
    ex.med_std_fraction = c.med_std_fraction;
    ex.eval.context = c.context;
    ex.eval.block_episodes = c.block_episodes;
    ex.eval.blocks = c.blocks;
    ex.eval.forecast_samples = c.forecast_samples;
    ex.eval.method = forecast::method_from_string(c.forecaster);
    ex.eval.estimator.k = c.candidates;
    ex.eval.estimator.mask = c.mask;
    ex.eval.gains = c.controller;
    ex.eval.jobs = c.jobs;
    return ex;
}

void check_checkpoint_matches(const RunConfig& c, const diffusion::DenoiserModel& model) {
    const auto& m = model.config();
    if (m.window != c.window || m.schedule.steps != c.diffusion_steps || m.state_dim != 4 || m.action_dim != 2) {
        throw ConfigError("checkpoint does not match the config: checkpoint has w=" + std::to_string(m.window) +
                          ", N=" + std::to_string(m.schedule.steps) + ", state dim " + std::to_string(m.state_dim) +
                          ", action dim " + std::to_string(m.action_dim) + "; config asks for w=" +
                          std::to_string(c.window) + ", N=" + std::to_string(c.diffusion_steps));
    }
}

}  // namespace forl::cli
