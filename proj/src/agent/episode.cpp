#include "forl/agent/episode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace forl::agent {

namespace {

/// Runs fn(0..n-1) on up to `jobs` threads; rethrows the exception of the
/// lowest failing index.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::size_t err_index = n;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < std::min(jobs, n); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

/// Per-segment medians of the model offsets recorded during one episode.
/// Segments without a model step repeat the previous history entry.
void append_dm_history(std::vector<StateVec>& history, const std::vector<std::pair<int, StateVec>>& offsets,
                       const maze::OffsetSchedule& schedule) {
    for (int seg = 0; seg < schedule.segments_per_episode; ++seg) {
        std::vector<std::pair<int, StateVec>> part;
        for (const auto& e : offsets) {
            if (schedule.segment(e.first) == seg) part.push_back(e);
        }
        const auto m = median_dm_offset(part);
        if (m) {
            history.push_back(*m);
        } else {
            history.push_back(history.empty() ? StateVec{} : history.back());
        }
    }
}

}  // namespace

EpisodeLog run_episode(const EpisodeEnv& env, Estimator& estimator, const EpisodeForecast* forecast,
                       num::Rng& env_rng, num::Rng& est_rng) {
    const auto& sched = env.schedule;
    if (env.episode >= sched.episodes()) throw std::out_of_range("run_episode: episode beyond the offset schedule");
    if (forecast && forecast->size() != static_cast<std::size_t>(sched.segments_per_episode)) {
        throw std::invalid_argument("run_episode: one forecast sample set per segment required");
    }
    EpisodeLog log;
    log.episode = env.episode;
    maze::SimState s = maze::reset(env.maze, env_rng);
    estimator.begin_episode(est_rng);
    TrajWindow window(env.window);
    maze::Observation o = maze::observe(s, sched, env.episode, 0);
    int last_segment = -1;
    for (int t = 0;; ++t) {
        const int seg = sched.segment(t);
        if (seg != last_segment) {
            log.offsets.push_back(sched.offset(env.episode, t));
            last_segment = seg;
        }
        const TruthAccess truth(s.vec());
        const num::Matrix* samples = forecast ? &(*forecast)[static_cast<std::size_t>(seg)] : nullptr;
        const StateVec est = estimator.estimate(StepInputs{o, window, t, samples, truth}, est_rng);
        log.truth_reads += truth.reads();
        for (double v : est) {
            if (!std::isfinite(v)) throw std::runtime_error("run_episode: non-finite state estimate");
        }
        const maze::Action a = scripted_policy(env.maze, maze::SimState::from_vec(est.data()), env.gains);
        const auto res = maze::step(env.maze, s, a, t);
        log.steps.push_back({t, s.vec(), o, est, a, res.reward});
        if (res.done) {
            log.success = res.success;
            break;
        }
        const maze::Observation next = maze::observe(res.state, sched, env.episode, t + 1);
        const std::array<double, 4> delta{next[0] - o[0], next[1] - o[1], next[2] - o[2], next[3] - o[3]};
        window.push(delta, a);
        s = res.state;
        o = next;
    }
    estimator.end_episode();
    return log;
}

num::Rng stream_rng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
    return num::Rng(seed, (static_cast<std::uint64_t>(purpose) << 40) | index);
}

void EvalConfig::validate() const {
    if (context < 4) throw std::invalid_argument("eval: context (C) must be >= 4");
    if (block_episodes < 1) throw std::invalid_argument("eval: block episodes (P) must be >= 1");
    if (blocks < 1) throw std::invalid_argument("eval: blocks must be >= 1");
    if (forecast_samples < 1) throw std::invalid_argument("eval: forecast samples (l) must be >= 1");
    if (jobs < 1) throw std::invalid_argument("eval: jobs must be >= 1");
    estimator.validate();
}

EvalResult run_eval_block(const maze::Maze& maze, const maze::OffsetSchedule& schedule,
                          const diffusion::DenoiserModel* model, EstimatorMode mode, const EvalConfig& config,
                          const forecast::ExternalForecasts* external) {
    config.validate();
    schedule.validate();
    if (schedule.episodes() < config.episodes_needed()) {
        throw std::runtime_error("series exhausted: evaluation needs " + std::to_string(config.episodes_needed()) +
                                 " episodes of offsets, schedule has " + std::to_string(schedule.episodes()));
    }
    if (needs_model(mode) && model == nullptr) {
        throw std::invalid_argument("mode " + to_string(mode) + " needs a trained diffusion model");
    }
    const std::size_t window = model ? model->config().window : 16;
    const auto& mask = config.estimator.mask;
    if (mask != schedule.mask) throw std::invalid_argument("eval: estimator mask differs from the schedule mask");
    const std::size_t segs = static_cast<std::size_t>(schedule.segments_per_episode);
    const std::size_t P = config.block_episodes;

    EvalResult result;
    result.mode = mode;
    result.episodes.resize(config.blocks * P);

    auto env_for = [&](std::size_t episode) {
        return EpisodeEnv{maze, schedule, episode, window, config.gains};
    };

    std::vector<StateVec> history;
    if (uses_dm_history(mode)) {
        for (std::size_t j = 0; j < config.context; ++j) {
            Estimator warm(EstimatorMode::forl_dm, config.estimator, model);
            auto env_rng = stream_rng(config.seed, StreamPurpose::env, j);
            auto est_rng = stream_rng(config.seed, StreamPurpose::estimator, j);
            run_episode(env_for(j), warm, nullptr, env_rng, est_rng);
            append_dm_history(history, warm.dm_offsets(), schedule);
        }
        result.warmup_episodes = config.context;
    }

    std::optional<Estimator> shared;
    if (is_stateful(mode)) shared.emplace(mode, config.estimator, model);

    const bool wants_samples = needs_forecast(mode) || uses_dm_history(mode);
    for (std::size_t b = 0; b < config.blocks; ++b) {
        const std::size_t first = config.context + b * P;
        forecast::ForecastSamples fs;
        if (wants_samples) {
            if (external && needs_forecast(mode)) {
                fs = external->block(first * segs, P * segs, mask.size());
            } else {
                forecast::ForecastRequest req;
                req.horizon = P * segs;
                req.samples = config.forecast_samples;
                req.context.resize(mask.size());
                if (needs_forecast(mode)) {
                    for (std::size_t k = 0; k < first * segs; ++k) {
                        const auto off = schedule.interval_offset(k);
                        ++result.revealed_reads;
                        for (std::size_t m = 0; m < mask.size(); ++m) req.context[m].push_back(off[mask[m]]);
                    }
                } else {
                    const std::size_t keep = std::min(history.size(), config.context * segs);
                    for (std::size_t k = history.size() - keep; k < history.size(); ++k) {
                        for (std::size_t m = 0; m < mask.size(); ++m) req.context[m].push_back(history[k][mask[m]]);
                    }
                }
                auto frng = stream_rng(config.seed, StreamPurpose::forecast, b);
                fs = forecast::forecast(config.method, req, frng);
            }
        }
        std::vector<EpisodeForecast> block_fc(P);
        if (wants_samples) {
            for (std::size_t e = 0; e < P; ++e) {
                for (std::size_t sg = 0; sg < segs; ++sg) {
                    num::Matrix m(fs.samples(), 4);
                    for (std::size_t i = 0; i < fs.samples(); ++i) {
                        for (std::size_t d = 0; d < mask.size(); ++d) m(i, mask[d]) = fs.per_dim[d](i, e * segs + sg);
                    }
                    block_fc[e].push_back(std::move(m));
                }
            }
        }

        std::vector<std::vector<std::pair<int, StateVec>>> dm_offsets(P);
        auto run_one = [&](std::size_t e, Estimator& est) {
            const std::size_t j = first + e;
            auto env_rng = stream_rng(config.seed, StreamPurpose::env, j);
            auto est_rng = stream_rng(config.seed, StreamPurpose::estimator, j);
            result.episodes[b * P + e] =
                run_episode(env_for(j), est, wants_samples ? &block_fc[e] : nullptr, env_rng, est_rng);
            dm_offsets[e] = est.dm_offsets();
        };
        if (shared) {
            for (std::size_t e = 0; e < P; ++e) run_one(e, *shared);
        } else {
            parallel_for(P, config.jobs, [&](std::size_t e) {
                Estimator est(mode, config.estimator, model);
                run_one(e, est);
            });
        }
        if (uses_dm_history(mode)) {
            for (const auto& offs : dm_offsets) append_dm_history(history, offs, schedule);
        }
    }
    return result;
}

void write_episode_logs_jsonl(const std::string& path, const EvalResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write episode log '" + path + "'");
    const std::string mode = to_string(result.mode);
    for (const auto& ep : result.episodes) {
        for (const auto& st : ep.steps) {
            nlohmann::json j;
            j["mode"] = mode;
            j["ep"] = ep.episode;
            j["t"] = st.t;
            j["s"] = st.s;
            j["o"] = st.o;
            j["est"] = st.est;
            j["a"] = st.a;
            j["r"] = st.reward;
            out << j.dump() << '\n';
        }
    }
    if (!out) throw std::runtime_error("error while writing episode log '" + path + "'");
}

}  // namespace forl::agent
