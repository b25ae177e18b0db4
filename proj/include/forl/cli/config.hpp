#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forl/agent/dataset.hpp"
#include "forl/agent/training.hpp"
#include "forl/eval/eval.hpp"

namespace forl::cli {

/// Invalid flags, config fields or missing input files; reported with exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a command needs. JSON keys equal the member names; protocol
/// symbols: P = block_episodes, C = context, l = forecast_samples,
/// k = candidates, w = window, N = diffusion_steps, f = segment_length.
struct RunConfig {
    /// Bundled maze name (large, four_corridor, open) or a maze file path.
    std::string maze = "large";
    /// Synthetic preset names or CSV paths; each is evaluated separately.
    std::vector<std::string> series{"synth-a"};
    std::vector<std::size_t> mask{0, 1};
    double alpha = 1.0;
    std::vector<std::string> modes{"raw-obs", "forecast-mean", "forl-dcm"};
    /// Mode every other mode is compared against in the Welch table.
    std::string baseline = "forecast-mean";
    std::size_t block_episodes = 10;
    std::size_t context = 64;
    std::size_t blocks = 5;
    std::size_t forecast_samples = 50;
    std::size_t candidates = 50;
    std::size_t window = 16;
    int diffusion_steps = 10;
    std::string offset_mode = "per-episode";
    int segment_length = 50;
    std::string forecaster = "seasonal-naive-bootstrap";
    /// Optional CSV of externally produced forecast samples.
    std::string external_forecasts;
    std::vector<double> alpha_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::uint64_t> seeds{0};
    std::size_t jobs = 1;
    std::string out = "runs";
    /// Dataset JSONL used by train; generated in the run directory when empty.
    std::string dataset;
    /// Checkpoint used by eval and sweep (and by train --resume).
    std::string checkpoint;
    double med_std_fraction = 0.1;
    std::size_t embed_dim = 64;
    /// Multiplier on standardized states in diffusion space.
    double observation_scale = agent::kDefaultObservationScale;
    std::vector<std::size_t> hidden{128, 128, 128};
    /// Expert controller used for data collection and at evaluation time.
    agent::ControllerGains controller;
    agent::DatasetOptions data;
    agent::TrainOptions train;
    std::size_t plot_bins = 20;

    /// Full check of ranges, names and referenced files. Throws ConfigError.
    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
/// Reads and validates a JSON config file; unknown keys are rejected.
RunConfig load_config(const std::string& path);

/// Resolves a bundled maze name or a path; throws ConfigError naming the path.
std::string resolve_maze_path(const std::string& maze);

/// FNV-1a 64-bit hash of the canonical JSON of the config without its
/// seeds, jobs and out fields, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// <out>/<command>-<hash>-s<seed>[_<seed>...]
std::string run_directory(const RunConfig& c, const std::string& command);

/// Denoiser architecture described by the config.
diffusion::DenoiserConfig denoiser_config(const RunConfig& c);

/// Base experiment for one series (maze and model pointers supplied by the caller).
eval::Experiment make_experiment(const RunConfig& c, const maze::Maze& maze, const diffusion::DenoiserModel* model,
                                 const std::string& series);

/// Throws ConfigError when the checkpoint was trained with a different
/// window, diffusion step count or state/action dimension.
void check_checkpoint_matches(const RunConfig& c, const diffusion::DenoiserModel& model);

}  // namespace forl::cli
