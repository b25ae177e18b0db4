#include "forl/agent/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace forl::agent {

using json = nlohmann::json;

namespace {

maze::GridCell random_free_cell(const maze::Maze& maze, num::Rng& rng) {
    const auto& cells = maze.free_cells();
    return cells[rng.below(cells.size())];
}

}  // namespace

std::size_t Dataset::episode_end(std::size_t e) const {
    return e + 1 < episode_starts.size() ? episode_starts[e + 1] : transitions.size();
}

void Dataset::validate() const {
    if (transitions.empty()) {
        if (!episode_starts.empty()) throw std::invalid_argument("dataset: episodes without transitions");
        return;
    }
    if (episode_starts.empty() || episode_starts.front() != 0) {
        throw std::invalid_argument("dataset: first episode must start at transition 0");
    }
    for (std::size_t e = 0; e < episodes(); ++e) {
        const std::size_t b = episode_begin(e), end = episode_end(e);
        if (b >= end) throw std::invalid_argument("dataset: empty episode " + std::to_string(e));
        for (std::size_t i = b; i < end; ++i) {
            if (transitions[i].ep != e) throw std::invalid_argument("dataset: episode label mismatch at " + std::to_string(i));
            if (i + 1 < end && transitions[i].sp != transitions[i + 1].s) {
                throw std::invalid_argument("dataset: transitions " + std::to_string(i) + " and " +
                                            std::to_string(i + 1) + " do not chain");
            }
        }
    }
}

void DatasetOptions::validate() const {
    if (episodes < 1) throw std::invalid_argument("dataset: episodes must be >= 1");
    if (!(exploration_noise >= 0.0)) throw std::invalid_argument("dataset: exploration noise must be >= 0");
    if (max_waypoints < 0) throw std::invalid_argument("dataset: max_waypoints must be >= 0");
    if (!(waypoint_radius > 0.0)) throw std::invalid_argument("dataset: waypoint radius must be positive");
    if (!(belief_offset_fraction >= 0.0 && belief_offset_fraction <= 1.0)) {
        throw std::invalid_argument("dataset: belief offset fraction must lie in [0, 1]");
    }
    if (!(belief_offset_std >= 0.0)) throw std::invalid_argument("dataset: belief offset std must be >= 0");
}

std::vector<Transition> rollout_expert(const maze::Maze& maze, const maze::SimState& start,
                                       const DatasetOptions& options, std::size_t episode, num::Rng& rng) {
    std::vector<maze::GridCell> targets;
    const auto waypoints = rng.below(static_cast<std::uint64_t>(options.max_waypoints) + 1);
    for (std::uint64_t i = 0; i < waypoints; ++i) targets.push_back(random_free_cell(maze, rng));
    targets.push_back(maze.goal_cell());
    maze::Vec2 belief_offset{0.0, 0.0};
    if (rng.uniform() < options.belief_offset_fraction) {
        belief_offset = {options.belief_offset_std * rng.gaussian(), options.belief_offset_std * rng.gaussian()};
    }

    std::vector<Transition> out;
    maze::SimState s = start;
    std::size_t target = 0;
    for (int t = 0; t < maze.params().max_steps; ++t) {
        maze::SimState belief = s;
        belief.pos[0] += belief_offset[0];
        belief.pos[1] += belief_offset[1];
        while (target + 1 < targets.size()) {
            const auto c = targets[target];
            if (std::hypot(belief.pos[0] - (c.col + 0.5), belief.pos[1] - (c.row + 0.5)) >= options.waypoint_radius) break;
            ++target;
        }
        maze::Action a = scripted_policy(maze, belief, targets[target], options.gains);
        for (double& v : a) v = std::clamp(v + options.exploration_noise * rng.gaussian(), -1.0, 1.0);
        const auto res = maze::step(maze, s, a, t);
        out.push_back({s.vec(), a, res.state.vec(), res.reward, episode});
        s = res.state;
        if (res.done) break;
    }
    return out;
}

Dataset generate_dataset(const maze::Maze& maze, const DatasetOptions& options, num::Rng& rng) {
    options.validate();
    const std::uint64_t base = rng.next_u64();
    Dataset data;
    for (std::size_t e = 0; e < options.episodes; ++e) {
        num::Rng ep_rng(base, e);
        const auto start = maze::reset(maze, ep_rng);
        auto tr = rollout_expert(maze, start, options, e, ep_rng);
        data.episode_starts.push_back(data.transitions.size());
        data.transitions.insert(data.transitions.end(), tr.begin(), tr.end());
    }
    return data;
}

void write_dataset_jsonl(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
    for (const auto& tr : data.transitions) {
        json j;
        j["s"] = tr.s;
        j["a"] = tr.a;
        j["sp"] = tr.sp;
        j["r"] = tr.r;
        j["ep"] = tr.ep;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("error while writing dataset '" + path + "'");
}

Dataset read_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
    Dataset data;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Transition tr;
        try {
            const auto j = json::parse(line);
            tr.s = j.at("s").get<StateVec>();
            tr.a = j.at("a").get<maze::Action>();
            tr.sp = j.at("sp").get<StateVec>();
            tr.r = j.at("r").get<double>();
            tr.ep = j.at("ep").get<std::size_t>();
        } catch (const json::exception& e) {
            throw std::runtime_error("dataset '" + path + "' line " + std::to_string(lineno) + ": " + e.what());
        }
        if (data.transitions.empty() || tr.ep != data.transitions.back().ep) {
            if (tr.ep != data.episodes()) {
                throw std::runtime_error("dataset '" + path + "' line " + std::to_string(lineno) +
                                         ": episodes must be numbered consecutively from 0");
            }
            data.episode_starts.push_back(data.transitions.size());
        }
        data.transitions.push_back(tr);
    }
    if (data.transitions.empty()) throw std::runtime_error("dataset '" + path + "' is empty");
    try {
        data.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("dataset '" + path + "': " + e.what());
    }
    return data;
}

WindowIndex make_window_index(const Dataset& data, std::size_t window, std::size_t validation_every) {
    if (window == 0) throw std::invalid_argument("make_window_index: window must be >= 1");
    WindowIndex idx;
    idx.window = window;
    for (std::size_t e = 0; e < data.episodes(); ++e) {
        const bool val = validation_every > 0 && e % validation_every == validation_every - 1;
        auto& dst = val ? idx.validation : idx.train;
        const std::size_t b = data.episode_begin(e), end = data.episode_end(e);
        for (std::size_t i = b; i + window <= end; ++i) dst.push_back(i);
    }
    if (idx.train.empty()) throw std::invalid_argument("make_window_index: no episode is longer than the window");
    return idx;
}

std::vector<double> window_at(const Dataset& data, std::size_t start, std::size_t window) {
    std::vector<double> out;
    out.reserve(window * 6);
    for (std::size_t i = start; i < start + window; ++i) {
        const auto& tr = data.transitions.at(i);
        for (std::size_t d = 0; d < 4; ++d) out.push_back(tr.sp[d] - tr.s[d]);
        out.push_back(tr.a[0]);
        out.push_back(tr.a[1]);
    }
    return out;
}

diffusion::TrainBatch make_batch(const Dataset& data, const std::vector<std::size_t>& starts, std::size_t window) {
    diffusion::TrainBatch b;
    b.states = num::Matrix(starts.size(), 4);
    b.windows = num::Matrix(starts.size(), window * 6);
    for (std::size_t r = 0; r < starts.size(); ++r) {
        const auto& target = data.transitions.at(starts[r] + window - 1).sp;
        std::copy(target.begin(), target.end(), b.states.row(r).begin());
        const auto w = window_at(data, starts[r], window);
        std::copy(w.begin(), w.end(), b.windows.row(r).begin());
    }
    return b;
}

diffusion::TrainBatch sample_batch(const Dataset& data, const std::vector<std::size_t>& starts, std::size_t window,
                                   std::size_t batch, num::Rng& rng) {
    if (starts.empty()) throw std::invalid_argument("sample_batch: no examples");
    std::vector<std::size_t> pick(batch);
    for (auto& p : pick) p = starts[rng.below(starts.size())];
    return make_batch(data, pick, window);
}

diffusion::FeatureScaling fit_scaling(const Dataset& data, const diffusion::DenoiserConfig& config,
                                      double observation_scale) {
    if (!(observation_scale > 0.0) || !std::isfinite(observation_scale)) {
        throw std::invalid_argument("fit_scaling: observation_scale must be positive");
    }
    if (config.state_dim != 4 || config.action_dim != 2) {
        throw std::invalid_argument("fit_scaling: maze data has 4 state and 2 action dims");
    }
    if (data.transitions.empty()) throw std::invalid_argument("fit_scaling: empty data set");
    auto finish = [](std::vector<double>& mean, std::vector<double>& sq, double n) {
        std::vector<double> scale(mean.size());
        for (std::size_t d = 0; d < mean.size(); ++d) {
            mean[d] /= n;
            const double var = sq[d] / n - mean[d] * mean[d];
            scale[d] = var > 1e-12 ? std::sqrt(var) : 1.0;
        }
        return scale;
    };
    std::vector<double> s_mean(4, 0.0), s_sq(4, 0.0), w_mean(6, 0.0), w_sq(6, 0.0);
    for (const auto& tr : data.transitions) {
        for (std::size_t d = 0; d < 4; ++d) {
            s_mean[d] += tr.s[d];
            s_sq[d] += tr.s[d] * tr.s[d];
            const double ds = tr.sp[d] - tr.s[d];
            w_mean[d] += ds;
            w_sq[d] += ds * ds;
        }
        for (std::size_t d = 0; d < 2; ++d) {
            w_mean[4 + d] += tr.a[d];
            w_sq[4 + d] += tr.a[d] * tr.a[d];
        }
    }
    const double n = static_cast<double>(data.transitions.size());
    diffusion::FeatureScaling sc;
    sc.state_scale = finish(s_mean, s_sq, n);
    for (auto& v : sc.state_scale) v /= observation_scale;
    sc.state_center = s_mean;
    sc.step_scale = finish(w_mean, w_sq, n);
    sc.step_center = w_mean;
    sc.validate(config);
    return sc;
}

}  // namespace forl::agent
