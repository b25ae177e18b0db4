#include "forl/agent/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forl/forecast/forecast.hpp"

namespace forl::agent {

namespace {

struct ModeName {
    EstimatorMode mode;
    const char* name;
};

constexpr ModeName kModeNames[] = {
    {EstimatorMode::oracle, "oracle"},
    {EstimatorMode::raw_obs, "raw-obs"},
    {EstimatorMode::forecast_mean, "forecast-mean"},
    {EstimatorMode::forecast_median, "forecast-median"},
    {EstimatorMode::forl_dcm, "forl-dcm"},
    {EstimatorMode::forl_kde, "forl-kde"},
    {EstimatorMode::forl_maxlik, "forl-maxlik"},
    {EstimatorMode::dm_fs_mean, "dm-fs-mean"},
    {EstimatorMode::dm_fs_median, "dm-fs-median"},
    {EstimatorMode::forl_dm, "forl-dm"},
    {EstimatorMode::dm_mad, "dm-mad"},
    {EstimatorMode::dm_ransac, "dm-ransac"},
    {EstimatorMode::dm_running_mean, "dm-running-mean"},
    {EstimatorMode::dm_running_mean_per_episode, "dm-running-mean-per-episode"},
    {EstimatorMode::med_noise, "med+noise"},
    {EstimatorMode::med_dcm, "med+dcm"},
    {EstimatorMode::h_lag, "h-lag"},
    {EstimatorMode::h_lag_dcm, "h-lag+dcm"},
};

}  // namespace

std::string to_string(EstimatorMode m) {
    for (const auto& e : kModeNames) {
        if (e.mode == m) return e.name;
    }
    throw std::invalid_argument("unknown estimator mode");
}

EstimatorMode estimator_mode_from_string(const std::string& s) {
    for (const auto& e : kModeNames) {
        if (s == e.name) return e.mode;
    }
    throw std::invalid_argument("unknown estimator mode '" + s + "'");
}

const std::vector<EstimatorMode>& all_estimator_modes() {
    static const std::vector<EstimatorMode> modes = [] {
        std::vector<EstimatorMode> out;
        for (const auto& e : kModeNames) out.push_back(e.mode);
        return out;
    }();
    return modes;
}

bool needs_model(EstimatorMode m) {
    switch (m) {
        case EstimatorMode::oracle:
        case EstimatorMode::raw_obs:
        case EstimatorMode::forecast_mean:
        case EstimatorMode::forecast_median:
            return false;
        default:
            return true;
    }
}

bool needs_forecast(EstimatorMode m) {
    switch (m) {
        case EstimatorMode::forecast_mean:
        case EstimatorMode::forecast_median:
        case EstimatorMode::forl_dcm:
        case EstimatorMode::forl_kde:
        case EstimatorMode::forl_maxlik:
        case EstimatorMode::dm_fs_mean:
        case EstimatorMode::dm_fs_median:
            return true;
        default:
            return false;
    }
}

bool uses_dm_history(EstimatorMode m) { return m == EstimatorMode::h_lag || m == EstimatorMode::h_lag_dcm; }

bool is_stateful(EstimatorMode m) {
    switch (m) {
        case EstimatorMode::dm_running_mean:
        case EstimatorMode::med_noise:
        case EstimatorMode::med_dcm:
            return true;
        default:
            return false;
    }
}

void EstimatorParams::validate() const {
    if (k < 1) throw std::invalid_argument("estimator: k must be >= 1");
    if (!(mad_eps > 0.0) || !(ransac_eps > 0.0)) throw std::invalid_argument("estimator: eps must be positive");
    if (ransac_iters < 1) throw std::invalid_argument("estimator: ransac_iters must be >= 1");
    for (double s : med_std) {
        if (!(s >= 0.0)) throw std::invalid_argument("estimator: med_std must be >= 0");
    }
    if (med_samples < 1) throw std::invalid_argument("estimator: med_samples must be >= 1");
    for (std::size_t d : mask) {
        if (d >= 4) throw std::invalid_argument("estimator: mask dimension out of range");
    }
}

Estimator::Estimator(EstimatorMode mode, EstimatorParams params, const diffusion::DenoiserModel* model)
    : mode_(mode), params_(std::move(params)), model_(model), running_(4) {
    params_.validate();
    if (needs_model(mode_) && model_ == nullptr) {
        throw std::invalid_argument("estimator mode " + to_string(mode_) + " requires a diffusion model");
    }
}

void Estimator::begin_episode(num::Rng& rng) {
    candidates_ = num::Matrix();
    dm_offsets_.clear();
    if (mode_ == EstimatorMode::dm_running_mean_per_episode) running_.reset();
    if (mode_ == EstimatorMode::med_noise && med_offset_) {
        for (std::size_t d : params_.mask) (*med_offset_)[d] += params_.med_std[d] * rng.gaussian();
    }
    if (mode_ == EstimatorMode::med_dcm && prev_median_) {
        med_offset_ = prev_median_;
        med_samples_ = num::Matrix(params_.med_samples, 4);
        for (std::size_t i = 0; i < params_.med_samples; ++i) {
            for (std::size_t d : params_.mask) med_samples_(i, d) = (*prev_median_)[d] + params_.med_std[d] * rng.gaussian();
        }
    }
}

void Estimator::end_episode() {
    const auto m = median_dm_offset(dm_offsets_);
    if (!m) return;
    if (mode_ == EstimatorMode::med_noise && !med_offset_) med_offset_ = m;
    if (mode_ == EstimatorMode::med_dcm) prev_median_ = m;
}

num::Matrix Estimator::draw_candidates(const TrajWindow& window, num::Rng& rng, std::size_t k) {
    if (!window.full()) throw std::logic_error("estimator: window is not full when the model is sampled");
    candidates_ = diffusion::sample_candidates(*model_, window.flatten(), k, rng);
    return candidates_;
}

StateVec Estimator::from_offset(const maze::Observation& o, const StateVec& offset) const {
    StateVec s = o;
    for (std::size_t d : params_.mask) s[d] = o[d] - offset[d];
    return s;
}

StateVec Estimator::forecast_point(const maze::Observation& o, const num::Matrix& samples, bool median) const {
    const auto c = median ? fusion::column_median(samples) : fusion::column_mean(samples);
    return from_offset(o, {c[0], c[1], c[2], c[3]});
}

num::Matrix Estimator::forecast_states(const maze::Observation& o, const num::Matrix& samples) const {
    num::Matrix y(samples.rows(), 4);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        for (std::size_t d = 0; d < 4; ++d) y(i, d) = o[d];
        for (std::size_t d : params_.mask) y(i, d) = o[d] - samples(i, d);
    }
    return y;
}

StateVec Estimator::record_dm(const maze::Observation& o, int t) {
    StateVec off{};
    for (std::size_t d = 0; d < 4; ++d) off[d] = o[d] - candidates_(0, d);
    dm_offsets_.emplace_back(t, off);
    return off;
}

const num::Matrix& Estimator::require_samples(const StepInputs& in) const {
    if (in.offset_samples == nullptr || in.offset_samples->rows() == 0) {
        throw std::invalid_argument("estimator mode " + to_string(mode_) + " requires offset samples");
    }
    if (in.offset_samples->cols() != 4) throw std::invalid_argument("estimator: offset samples must have 4 columns");
    return *in.offset_samples;
}

StateVec Estimator::estimate(const StepInputs& in, num::Rng& rng) {
    const auto& o = in.o;
    const bool use_model = in.t > static_cast<int>(model_ ? model_->config().window : 0);
    auto with_mask = [&](const std::vector<double>& s) {
        StateVec out = o;
        for (std::size_t d : params_.mask) out[d] = s[d];
        return out;
    };
    auto dm_only = [&]() -> StateVec {
        if (!use_model) return o;
        draw_candidates(in.window, rng, params_.log_candidates ? params_.k : 1);
        record_dm(o, in.t);
        const auto r = candidates_.row(0);
        return with_mask({r.begin(), r.end()});
    };

    switch (mode_) {
        case EstimatorMode::oracle:
            return in.truth.read();
        case EstimatorMode::raw_obs:
            return o;
        case EstimatorMode::forecast_mean:
            return forecast_point(o, require_samples(in), false);
        case EstimatorMode::forecast_median:
            return forecast_point(o, require_samples(in), true);
        case EstimatorMode::forl_dcm:
        case EstimatorMode::forl_kde:
        case EstimatorMode::forl_maxlik:
        case EstimatorMode::dm_fs_mean:
        case EstimatorMode::dm_fs_median:
        case EstimatorMode::h_lag_dcm: {
            const auto& samples = require_samples(in);
            if (!use_model) return forecast_point(o, samples, false);
            const auto x = draw_candidates(in.window, rng, params_.k);
            record_dm(o, in.t);
            const auto y = forecast_states(o, samples);
            switch (mode_) {
                case EstimatorMode::forl_kde:
                    return with_mask(fusion::kde_fuse(x, y));
                case EstimatorMode::forl_maxlik:
                    return with_mask(fusion::max_likelihood_fuse(x, y));
                case EstimatorMode::dm_fs_mean:
                    return with_mask(fusion::closest_to_center(x, fusion::column_mean(y)));
                case EstimatorMode::dm_fs_median:
                    return with_mask(fusion::closest_to_center(x, fusion::column_median(y)));
                default:
                    return with_mask(fusion::dcm(x, y));
            }
        }
        case EstimatorMode::h_lag: {
            const auto& samples = require_samples(in);
            if (use_model) {
                draw_candidates(in.window, rng, params_.log_candidates ? params_.k : 1);
                record_dm(o, in.t);
            }
            return forecast_point(o, samples, false);
        }
        case EstimatorMode::forl_dm:
            return dm_only();
        case EstimatorMode::dm_mad:
        case EstimatorMode::dm_ransac: {
            if (!use_model) return o;
            const auto x = draw_candidates(in.window, rng, params_.k);
            record_dm(o, in.t);
            if (mode_ == EstimatorMode::dm_mad) return with_mask(fusion::mad_offset_estimate(o, x, params_.mad_eps));
            return with_mask(fusion::ransac_offset_estimate(o, x, params_.ransac_eps, params_.ransac_iters, rng));
        }
        case EstimatorMode::dm_running_mean:
        case EstimatorMode::dm_running_mean_per_episode: {
            if (use_model) {
                const auto x = draw_candidates(in.window, rng, params_.k);
                record_dm(o, in.t);
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    const auto r = x.row(i);
                    const std::array<double, 4> off{o[0] - r[0], o[1] - r[1], o[2] - r[2], o[3] - r[3]};
                    fusion::welford_update(running_, off);
                }
            }
            if (running_.count == 0) return o;
            return from_offset(o, {running_.mean[0], running_.mean[1], running_.mean[2], running_.mean[3]});
        }
        case EstimatorMode::med_noise:
            if (med_offset_) return from_offset(o, *med_offset_);
            return dm_only();
        case EstimatorMode::med_dcm: {
            if (med_samples_.rows() == 0) return dm_only();
            if (!use_model) return forecast_point(o, med_samples_, false);
            const auto x = draw_candidates(in.window, rng, params_.k);
            record_dm(o, in.t);
            return with_mask(fusion::dcm(x, forecast_states(o, med_samples_)));
        }
    }
    throw std::logic_error("estimator: unhandled mode");
}

std::optional<StateVec> median_dm_offset(const std::vector<std::pair<int, StateVec>>& offsets) {
    if (offsets.empty()) return std::nullopt;
    StateVec out{};
    for (std::size_t d = 0; d < 4; ++d) {
        std::vector<double> v;
        v.reserve(offsets.size());
        for (const auto& [t, off] : offsets) v.push_back(off[d]);
        out[d] = forecast::median(std::move(v));
    }
    return out;
}

}  // namespace forl::agent
