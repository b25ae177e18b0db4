#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "forl/agent/dataset.hpp"
#include "forl/diffusion/denoiser.hpp"

namespace forl::agent {

struct TrainOptions {
    std::size_t steps = 20000;
    std::size_t batch = 128;
    double lr = 9e-4;
    /// Cosine decay of the learning rate from lr at step 0 to
    /// lr * lr_final_fraction at `steps`; 1 keeps it constant.
    double lr_final_fraction = 1.0;
    /// Record the batch loss every log_every steps (and at step 0).
    std::size_t log_every = 100;
    /// Evaluate the held-out loss every val_every steps (0 disables).
    std::size_t val_every = 1000;
    std::size_t val_batch = 1024;

    void validate() const;
};

struct LossPoint {
    std::uint64_t step = 0;
    double loss = 0.0;
};

struct TrainLog {
    std::vector<LossPoint> train;
    std::vector<LossPoint> validation;
};

/// Learning rate used for optimizer step `step` (0-based).
double learning_rate_at(const TrainOptions& options, std::uint64_t step);

/// Default multiplier on standardized states in diffusion space.
inline constexpr double kDefaultObservationScale = 5.0;

/// Fresh model with feature scaling fitted to `data` (see fit_scaling).
diffusion::DenoiserModel init_model(const diffusion::DenoiserConfig& config, const Dataset& data, num::Rng& rng,
                                    double observation_scale = kDefaultObservationScale);

/// Fresh optimizer and RNG state for a training run with `seed`.
diffusion::TrainingState start_training(const diffusion::DenoiserModel& model, const TrainOptions& options,
                                        std::uint64_t seed);

/// Runs optimizer steps from state.step up to options.steps, sampling batches
/// from the training split and drawing noise from state.rng. The validation
/// batch and its noise are fixed so successive validation losses compare the
/// same examples. `on_log` (optional) sees each recorded point as it is made.
TrainLog train_denoiser(diffusion::DenoiserModel& model, const Dataset& data, const TrainOptions& options,
                        diffusion::TrainingState& state,
                        const std::function<void(const LossPoint&, bool validation)>& on_log = {});

/// Loss of `model` on the fixed validation batch used by train_denoiser.
double validation_loss(const diffusion::DenoiserModel& model, const Dataset& data, const WindowIndex& index,
                       std::size_t batch);

}  // namespace forl::agent
