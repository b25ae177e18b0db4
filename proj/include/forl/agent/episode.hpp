#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "forl/agent/estimator.hpp"
#include "forl/agent/policy.hpp"
#include "forl/diffusion/denoiser.hpp"
#include "forl/forecast/forecast.hpp"
#include "forl/maze/maze.hpp"
#include "forl/maze/offsets.hpp"

namespace forl::agent {

struct StepRecord {
    int t = 0;
    StateVec s{};
    maze::Observation o{};
    StateVec est{};
    maze::Action a{};
    double reward = 0.0;
};

struct EpisodeLog {
    std::size_t episode = 0;
    bool success = false;
    std::vector<StepRecord> steps;
    /// Offset of every interval the episode touched, in order.
    std::vector<StateVec> offsets;
    /// Number of times the estimator read the true state.
    std::size_t truth_reads = 0;

    double score() const { return success ? 100.0 : 0.0; }
};

/// Offset samples for one episode: entry s is the l x 4 sample matrix of
/// segment s (a single entry in per-episode mode).
using EpisodeForecast = std::vector<num::Matrix>;

struct EpisodeEnv {
    const maze::Maze& maze;
    const maze::OffsetSchedule& schedule;
    std::size_t episode = 0;
    std::size_t window = 16;
    ControllerGains gains;
};

/// Test-time loop: reset, then per step estimate the state from o_t and the
/// window, act on the estimate, observe o_{t+1}, push (o_{t+1} - o_t, a_t)
/// and advance t, until the goal or the step limit.
EpisodeLog run_episode(const EpisodeEnv& env, Estimator& estimator, const EpisodeForecast* forecast,
                       num::Rng& env_rng, num::Rng& est_rng);

/// Generator for (seed, purpose, index); purposes keep environment resets,
/// estimator draws and forecasts on disjoint streams.
enum class StreamPurpose : std::uint64_t { env = 1, estimator = 2, forecast = 3 };
num::Rng stream_rng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

struct EvalConfig {
    /// Episodes whose offsets form the initial context (C).
    std::size_t context = 64;
    /// Episodes per block between offset reveals (P).
    std::size_t block_episodes = 10;
    std::size_t blocks = 5;
    /// Forecast sample paths (l).
    std::size_t forecast_samples = 50;
    forecast::Method method = forecast::Method::seasonal_naive_bootstrap;
    EstimatorParams estimator;
    ControllerGains gains;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t episodes_needed() const { return context + blocks * block_episodes; }
};

struct EvalResult {
    EstimatorMode mode = EstimatorMode::oracle;
    /// Evaluated episodes C .. C + blocks * P - 1, in order.
    std::vector<EpisodeLog> episodes;
    /// Reads of true (revealed) schedule offsets made to build forecaster context.
    std::size_t revealed_reads = 0;
    /// Context episodes run to build the model-derived offset history (h-lag modes).
    std::size_t warmup_episodes = 0;
};

/// Runs the block protocol for one mode. Before each block the forecaster is
/// fitted on the offsets revealed so far (or, in h-lag modes, on the model's
/// own per-interval offset estimates of the most recent C episodes) and
/// produces samples for the block's P episodes, which then run without any
/// access to their true offsets. `external` replaces the fitted forecaster
/// when given. Throws std::runtime_error when the schedule is too short.
EvalResult run_eval_block(const maze::Maze& maze, const maze::OffsetSchedule& schedule,
                          const diffusion::DenoiserModel* model, EstimatorMode mode, const EvalConfig& config,
                          const forecast::ExternalForecasts* external = nullptr);

/// One JSON object per step: {"mode","ep","t","s","o","est","a","r"}.
void write_episode_logs_jsonl(const std::string& path, const EvalResult& result);

}  // namespace forl::agent
