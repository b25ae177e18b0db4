#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forl/diffusion/schedule.hpp"
#include "forl/numkit/adam.hpp"
#include "forl/numkit/matrix.hpp"
#include "forl/numkit/mlp.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::diffusion {

struct DenoiserConfig {
    std::size_t state_dim = 4;
    std::size_t action_dim = 2;
    std::size_t window = 16;
    std::size_t embed_dim = 64;
    std::vector<std::size_t> hidden{128, 128, 128};
    VpSchedule schedule;

    /// Width of one (delta-observation, action) window entry.
    std::size_t step_dim() const { return state_dim + action_dim; }
    std::size_t window_width() const { return window * step_dim(); }
    std::size_t input_dim() const { return state_dim + window_width() + embed_dim; }
    void validate() const;
};

/// Affine maps that bring raw maze quantities to roughly unit scale before
/// they reach the network. Diffusion runs in normalized state space; the
/// window features share one (center, scale) pair per entry component.
struct FeatureScaling {
    std::vector<double> state_center;
    std::vector<double> state_scale;
    std::vector<double> step_center;
    std::vector<double> step_scale;

    static FeatureScaling identity(const DenoiserConfig& cfg);
    void validate(const DenoiserConfig& cfg) const;
};

/// The conditional noise model eps_theta(s^(n), tau, n) plus everything
/// needed to use it: schedule, window size and feature scaling.
class DenoiserModel {
public:
    DenoiserModel(DenoiserConfig config, FeatureScaling scaling, num::MlpParams net);

    static DenoiserModel create(DenoiserConfig config, FeatureScaling scaling, num::Rng& rng);

    const DenoiserConfig& config() const { return config_; }
    const FeatureScaling& scaling() const { return scaling_; }
    const ScheduleTable& table() const { return table_; }
    const num::MlpParams& net() const { return net_; }
    num::MlpParams& net() { return net_; }

    std::vector<double> normalize_state(std::span<const double> s) const;
    std::vector<double> denormalize_state(std::span<const double> z) const;
    /// Flattened raw window (oldest first) -> normalized features.
    std::vector<double> normalize_window(std::span<const double> window) const;

    /// Writes network input row `row` of `x`: [z, window_norm, embed(n)].
    void fill_input(num::Matrix& x, std::size_t row, std::span<const double> z,
                    std::span<const double> window_norm, int n) const;

    /// eps_theta for a batch of normalized states sharing one window and step.
    num::Matrix predict_noise(const num::Matrix& z, std::span<const double> window_norm, int n) const;

    const std::vector<double>& step_embedding(int n) const;

private:
    DenoiserConfig config_;
    FeatureScaling scaling_;
    num::MlpParams net_;
    ScheduleTable table_;
    std::vector<std::vector<double>> embeddings_;
};

/// Raw-unit training examples: row i pairs target state i with its window.
struct TrainBatch {
    num::Matrix states;   // B x state_dim
    num::Matrix windows;  // B x window * step_dim, oldest entry first

    std::size_t size() const { return states.rows(); }
};

/// Diffusion step and noise drawn for each batch item (per item: n, then eps).
struct NoiseDraws {
    std::vector<int> steps;
    num::Matrix eps;
};

NoiseDraws draw_noise(std::size_t batch, std::size_t state_dim, const VpSchedule& schedule, num::Rng& rng);

/// Batched noise predictor in normalized space: (noisy states, windows, steps) -> eps.
using BatchNoisePredictor =
    std::function<num::Matrix(const num::Matrix& noisy, const num::Matrix& windows, const std::vector<int>& steps)>;

/// Mean over items of ||eps - eps_theta(s^(n), tau, n)||^2 for fixed draws.
/// `states` must already be in the predictor's space.
double denoising_loss(const BatchNoisePredictor& predictor, const num::Matrix& states, const num::Matrix& windows,
                      const NoiseDraws& draws, const ScheduleTable& table);

/// One optimizer step on the denoising objective. Returns the loss measured
/// before the update. Throws std::domain_error on a non-finite loss.
double training_step(DenoiserModel& model, const TrainBatch& batch, num::AdamState& opt, num::Rng& rng);

/// Loss of the current parameters on a batch with freshly drawn noise (no update).
double evaluate_loss(const DenoiserModel& model, const TrainBatch& batch, num::Rng& rng);

using NoisePredictor = std::function<std::vector<double>(std::span<const double> s_n, int n)>;

/// Runs s^(N) -> s^(0) with `predictor`. Noise for steps n > 1 comes from
/// `noise_rng`; pass nullptr for an all-zero noise sequence.
std::vector<double> run_reverse_chain(const VpSchedule& schedule, std::vector<double> s_start,
                                      const NoisePredictor& predictor, num::Rng* noise_rng);

/// k independent reverse chains conditioned on one window, returned in raw
/// state units (k x state_dim). Chain i draws from stream i of a generator
/// seeded by one draw from `rng`, so chain i does not depend on k.
num::Matrix sample_candidates(const DenoiserModel& model, std::span<const double> window, std::size_t k,
                              num::Rng& rng);

/// Optimizer/RNG state carried in a training checkpoint so runs can resume.
struct TrainingState {
    num::AdamState adam;
    num::Rng::State rng;
    std::uint64_t step = 0;
};

void save_checkpoint(const std::string& path, const DenoiserModel& model,
                     const std::optional<TrainingState>& training = std::nullopt);

struct LoadedCheckpoint {
    DenoiserModel model;
    std::optional<TrainingState> training;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace forl::diffusion
