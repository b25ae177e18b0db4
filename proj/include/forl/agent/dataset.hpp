#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "forl/agent/policy.hpp"
#include "forl/diffusion/denoiser.hpp"
#include "forl/maze/maze.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::agent {

using StateVec = std::array<double, 4>;

struct Transition {
    StateVec s{};
    maze::Action a{};
    StateVec sp{};
    double r = 0.0;
    std::size_t ep = 0;
};

/// Offset-free transitions; episode e occupies transitions
/// [episode_starts[e], episode_starts[e + 1]).
struct Dataset {
    std::vector<Transition> transitions;
    std::vector<std::size_t> episode_starts;

    std::size_t size() const { return transitions.size(); }
    std::size_t episodes() const { return episode_starts.size(); }
    std::size_t episode_begin(std::size_t e) const { return episode_starts.at(e); }
    std::size_t episode_end(std::size_t e) const;

    /// Checks episode bookkeeping and that consecutive transitions chain (s' = next s).
    void validate() const;
};

struct DatasetOptions {
    std::size_t episodes = 500;
    /// Std of the Gaussian noise added to each expert action component.
    double exploration_noise = 0.3;
    /// Each episode visits 0..max_waypoints random free cells before heading for the goal.
    int max_waypoints = 2;
    /// Distance to a waypoint centre at which the expert moves on to the next target.
    double waypoint_radius = 0.5;
    /// Fraction of episodes in which the expert steers by a believed position
    /// shifted by a constant N(0, belief_offset_std^2) error per axis, so the
    /// data also covers the wall contacts of a mislocalized agent. Recorded
    /// states are always the true ones.
    double belief_offset_fraction = 0.5;
    double belief_offset_std = 1.5;
    ControllerGains gains;

    void validate() const;
};

/// One noisy expert rollout from `start`. The episode ends when the maze
/// goal is reached or after max_steps steps.
std::vector<Transition> rollout_expert(const maze::Maze& maze, const maze::SimState& start,
                                       const DatasetOptions& options, std::size_t episode, num::Rng& rng);

/// Rollouts from uniform starts; episode e draws from stream e of a generator
/// seeded by one draw of `rng`.
Dataset generate_dataset(const maze::Maze& maze, const DatasetOptions& options, num::Rng& rng);

/// JSONL, one transition per line: {"s":[..],"a":[..],"sp":[..],"r":..,"ep":..}.
void write_dataset_jsonl(const std::string& path, const Dataset& data);
Dataset read_dataset_jsonl(const std::string& path);

/// Training examples for window length w: example i pairs the state reached
/// by transition start_i + w - 1 with the window of transitions
/// start_i .. start_i + w - 1 of the same episode.
struct WindowIndex {
    std::size_t window = 0;
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Every episode whose index is congruent to validation_every - 1 modulo
/// validation_every goes to the validation split (0 disables the split).
WindowIndex make_window_index(const Dataset& data, std::size_t window, std::size_t validation_every = 10);

/// Flattened raw window [ds, a] x w, oldest first, for the example starting at `start`.
std::vector<double> window_at(const Dataset& data, std::size_t start, std::size_t window);

/// Batch of `batch` examples drawn uniformly (with replacement) from `starts`.
diffusion::TrainBatch sample_batch(const Dataset& data, const std::vector<std::size_t>& starts, std::size_t window,
                                   std::size_t batch, num::Rng& rng);

/// Batch holding the given examples in order.
diffusion::TrainBatch make_batch(const Dataset& data, const std::vector<std::size_t>& starts, std::size_t window);

/// Per-component mean and standard deviation of states and of window entries
/// (state differences and actions) over the data set; a zero std maps to 1.
/// States are additionally multiplied by `observation_scale` in diffusion space.
diffusion::FeatureScaling fit_scaling(const Dataset& data, const diffusion::DenoiserConfig& config,
                                      double observation_scale = 1.0);

}  // namespace forl::agent
