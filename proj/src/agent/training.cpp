#include "forl/agent/training.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace forl::agent {

namespace {

constexpr std::uint64_t kValidationSeed = 0x76616c6964ULL;

std::vector<std::size_t> validation_examples(const WindowIndex& index, std::size_t batch) {
    const auto& pool = index.validation.empty() ? index.train : index.validation;
    const std::size_t n = std::min(batch, pool.size());
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = pool[i * pool.size() / n];
    return out;
}

}  // namespace

void TrainOptions::validate() const {
    if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
    if (!(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0)) {
        throw std::invalid_argument("train: lr_final_fraction must lie in (0, 1]");
    }
    if (log_every < 1) throw std::invalid_argument("train: log_every must be >= 1");
    if (val_batch < 1) throw std::invalid_argument("train: val_batch must be >= 1");
}

double learning_rate_at(const TrainOptions& options, std::uint64_t step) {
    if (options.lr_final_fraction == 1.0 || options.steps == 0) return options.lr;
    const double progress = std::min(1.0, static_cast<double>(step) / static_cast<double>(options.steps));
    const double cosine = 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
    return options.lr * (options.lr_final_fraction + (1.0 - options.lr_final_fraction) * cosine);
}

diffusion::DenoiserModel init_model(const diffusion::DenoiserConfig& config, const Dataset& data, num::Rng& rng,
                                    double observation_scale) {
    config.validate();
    return diffusion::DenoiserModel::create(config, fit_scaling(data, config, observation_scale), rng);
}

diffusion::TrainingState start_training(const diffusion::DenoiserModel& model, const TrainOptions& options,
                                        std::uint64_t seed) {
    num::AdamConfig adam;
    adam.lr = options.lr;
    diffusion::TrainingState st;
    st.adam = num::AdamState::fresh(model.net().num_params(), adam);
    st.rng = num::Rng(seed, 1).state();
    st.step = 0;
    return st;
}

double validation_loss(const diffusion::DenoiserModel& model, const Dataset& data, const WindowIndex& index,
                       std::size_t batch) {
    const auto b = make_batch(data, validation_examples(index, batch), index.window);
    num::Rng noise(kValidationSeed, 0);
    return diffusion::evaluate_loss(model, b, noise);
}

TrainLog train_denoiser(diffusion::DenoiserModel& model, const Dataset& data, const TrainOptions& options,
                        diffusion::TrainingState& state,
                        const std::function<void(const LossPoint&, bool validation)>& on_log) {
    options.validate();
    const std::size_t w = model.config().window;
    const auto index = make_window_index(data, w);
    const auto val_batch = make_batch(data, validation_examples(index, options.val_batch), w);
    auto rng = num::Rng::from_state(state.rng);
    TrainLog log;
    auto record = [&](std::vector<LossPoint>& dst, LossPoint p, bool validation) {
        dst.push_back(p);
        if (on_log) on_log(p, validation);
    };
    while (state.step < options.steps) {
        const auto batch = sample_batch(data, index.train, w, options.batch, rng);
        state.adam.config.lr = learning_rate_at(options, state.step);
        const double loss = diffusion::training_step(model, batch, state.adam, rng);
        if (state.step % options.log_every == 0) record(log.train, {state.step, loss}, false);
        ++state.step;
        if (options.val_every > 0 && (state.step % options.val_every == 0 || state.step == options.steps)) {
            num::Rng noise(kValidationSeed, 0);
            record(log.validation, {state.step, diffusion::evaluate_loss(model, val_batch, noise)}, true);
        }
    }
    state.rng = rng.state();
    return log;
}

}  // namespace forl::agent
