#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "forl/agent/dataset.hpp"
#include "forl/agent/window.hpp"
#include "forl/diffusion/denoiser.hpp"
#include "forl/fusion/fusion.hpp"
#include "forl/maze/offsets.hpp"
#include "forl/numkit/matrix.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::agent {

enum class EstimatorMode {
    oracle,
    raw_obs,
    forecast_mean,
    forecast_median,
    forl_dcm,
    forl_kde,
    forl_maxlik,
    dm_fs_mean,
    dm_fs_median,
    forl_dm,
    dm_mad,
    dm_ransac,
    dm_running_mean,
    dm_running_mean_per_episode,
    med_noise,
    med_dcm,
    h_lag,
    h_lag_dcm,
};

std::string to_string(EstimatorMode m);
EstimatorMode estimator_mode_from_string(const std::string& s);
const std::vector<EstimatorMode>& all_estimator_modes();

/// Sampling the diffusion model is required.
bool needs_model(EstimatorMode m);
/// Offset samples from a forecaster fitted on revealed true offsets are required.
bool needs_forecast(EstimatorMode m);
/// Offset samples come from a forecaster fitted on the model's own offset history.
bool uses_dm_history(EstimatorMode m);
/// The estimate depends on previous episodes, so episodes must run in order.
bool is_stateful(EstimatorMode m);

struct EstimatorParams {
    /// Candidates drawn from the diffusion model per step.
    std::size_t k = 50;
    double mad_eps = fusion::kMadEps;
    double ransac_eps = fusion::kRansacEps;
    int ransac_iters = fusion::kRansacIters;
    /// Per-dimension std of the Gaussian offsets (med+dcm) and random-walk
    /// increments (med+noise).
    std::array<double, 4> med_std{0.0, 0.0, 0.0, 0.0};
    /// Gaussian offset samples drawn per episode by med+dcm.
    std::size_t med_samples = 50;
    /// Dimensions carrying offsets; the remaining dimensions are observed
    /// exactly and copied from the observation.
    std::vector<std::size_t> mask{0, 1};
    /// forl-dm draws k candidates instead of one so they can be logged.
    bool log_candidates = false;

    void validate() const;
};

/// Read-counting view of the true state, handed to the estimator so tests can
/// check that only the oracle mode looks at it.
class TruthAccess {
public:
    explicit TruthAccess(const StateVec& s) : s_(s) {}
    const StateVec& read() const {
        ++reads_;
        return s_;
    }
    std::size_t reads() const { return reads_; }

private:
    StateVec s_;
    mutable std::size_t reads_ = 0;
};

struct StepInputs {
    const maze::Observation& o;
    const TrajWindow& window;
    /// Steps taken so far in the episode.
    int t = 0;
    /// l x 4 offset samples for the current interval (zero outside the mask),
    /// or nullptr when the mode has none.
    const num::Matrix* offset_samples = nullptr;
    const TruthAccess& truth;
};

/// Produces the state estimate fed to the policy, carrying whatever
/// cross-step and cross-episode state its mode needs.
class Estimator {
public:
    Estimator(EstimatorMode mode, EstimatorParams params, const diffusion::DenoiserModel* model);

    EstimatorMode mode() const { return mode_; }
    const EstimatorParams& params() const { return params_; }

    /// Call before the first step of every episode; draws from `rng` only in
    /// the med+noise and med+dcm modes.
    void begin_episode(num::Rng& rng);
    StateVec estimate(const StepInputs& in, num::Rng& rng);
    void end_episode();

    /// Candidates drawn at the last step (empty when none were drawn).
    const num::Matrix& last_candidates() const { return candidates_; }
    /// (t, o_t - chosen model state) for every step of the current or last
    /// episode at which the model was sampled. The chosen state is candidate 0.
    const std::vector<std::pair<int, StateVec>>& dm_offsets() const { return dm_offsets_; }
    /// Offset used by med+noise / centre used by med+dcm for the current episode.
    const std::optional<StateVec>& median_offset() const { return med_offset_; }

private:
    num::Matrix draw_candidates(const TrajWindow& window, num::Rng& rng, std::size_t k);
    StateVec from_offset(const maze::Observation& o, const StateVec& offset) const;
    StateVec forecast_point(const maze::Observation& o, const num::Matrix& samples, bool median) const;
    num::Matrix forecast_states(const maze::Observation& o, const num::Matrix& samples) const;
    StateVec record_dm(const maze::Observation& o, int t);
    const num::Matrix& require_samples(const StepInputs& in) const;

    EstimatorMode mode_;
    EstimatorParams params_;
    const diffusion::DenoiserModel* model_;
    num::Matrix candidates_;
    std::vector<std::pair<int, StateVec>> dm_offsets_;
    fusion::WelfordState running_;
    std::optional<StateVec> med_offset_;
    std::optional<StateVec> prev_median_;
    num::Matrix med_samples_;
};

/// Median over steps of the recorded model offsets, per dimension.
std::optional<StateVec> median_dm_offset(const std::vector<std::pair<int, StateVec>>& offsets);

}  // namespace forl::agent
