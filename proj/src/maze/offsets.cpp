#include "forl/maze/offsets.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace forl::maze {

std::string to_string(OffsetMode m) { return m == OffsetMode::per_episode ? "per-episode" : "intra-episode"; }

OffsetMode offset_mode_from_string(const std::string& s) {
    if (s == "per-episode") return OffsetMode::per_episode;
    if (s == "intra-episode") return OffsetMode::intra_episode;
    throw std::invalid_argument("unknown offset mode '" + s + "' (expected per-episode or intra-episode)");
}

void OffsetSchedule::validate() const {
    if (alpha_scale < 0.0) throw std::invalid_argument("offset schedule: alpha_scale must be >= 0");
    if (segment_length < 1 || segments_per_episode < 1) {
        throw std::invalid_argument("offset schedule: segment settings must be >= 1");
    }
    if (mode == OffsetMode::per_episode && segments_per_episode != 1) {
        throw std::invalid_argument("offset schedule: per-episode mode uses one segment");
    }
    for (auto d : mask) {
        if (d >= 4) throw std::invalid_argument("offset schedule: mask dimension out of range");
    }
    for (const auto& b : base) {
        for (std::size_t d = 0; d < 4; ++d) {
            const bool masked = std::find(mask.begin(), mask.end(), d) != mask.end();
            if (!masked && b[d] != 0.0) throw std::invalid_argument("offset schedule: unmasked offset must be 0");
        }
    }
}

std::size_t OffsetSchedule::episodes() const { return base.size() / static_cast<std::size_t>(segments_per_episode); }

int OffsetSchedule::segment(int t) const {
    if (mode == OffsetMode::per_episode) return 0;
    return std::min(t / segment_length, segments_per_episode - 1);
}

std::size_t OffsetSchedule::interval(std::size_t episode, int t) const {
    if (t < 0) throw std::out_of_range("offset schedule: negative step");
    const std::size_t k = episode * static_cast<std::size_t>(segments_per_episode) + static_cast<std::size_t>(segment(t));
    if (k >= base.size()) {
        throw std::out_of_range("offset schedule exhausted at episode " + std::to_string(episode));
    }
    return k;
}

std::array<double, 4> OffsetSchedule::interval_offset(std::size_t k) const {
    if (k >= base.size()) throw std::out_of_range("offset schedule exhausted at interval " + std::to_string(k));
    std::array<double, 4> b{};
    for (std::size_t d = 0; d < 4; ++d) b[d] = alpha_scale * base[k][d];
    return b;
}

std::array<double, 4> OffsetSchedule::offset(std::size_t episode, int t) const {
    return interval_offset(interval(episode, t));
}

Observation observe(const SimState& s, const OffsetSchedule& schedule, std::size_t episode, int t) {
    const auto b = schedule.offset(episode, t);
    const auto v = s.vec();
    return {v[0] + b[0], v[1] + b[1], v[2] + b[2], v[3] + b[3]};
}

Observation affine_observe(const SimState& s, double beta, const std::array<double, 4>& bias,
                           const std::vector<std::size_t>& mask) {
    if (!(beta > 0.0)) throw std::invalid_argument("affine_observe: scale must be positive");
    Observation o = s.vec();
    for (auto d : mask) {
        if (d >= 4) throw std::invalid_argument("affine_observe: mask dimension out of range");
        o[d] = beta * o[d] + bias[d];
    }
    return o;
}

OffsetSchedule build_offset_schedule(const std::vector<std::vector<double>>& normalized_series,
                                     const std::array<double, 4>& range, double alpha_scale, OffsetMode mode,
                                     std::size_t episodes, const std::vector<std::size_t>& mask, int segment_length,
                                     int max_steps) {
    if (normalized_series.size() != mask.size()) {
        throw std::invalid_argument("build_offset_schedule: need one series per masked dimension (" +
                                    std::to_string(mask.size()) + "), got " +
                                    std::to_string(normalized_series.size()));
    }
    OffsetSchedule s;
    s.mask = mask;
    s.mode = mode;
    s.alpha_scale = alpha_scale;
    s.segment_length = segment_length;
    if (segment_length < 1) throw std::invalid_argument("build_offset_schedule: segment length must be >= 1");
    s.segments_per_episode = mode == OffsetMode::per_episode ? 1 : (max_steps + segment_length - 1) / segment_length;
    const std::size_t intervals = episodes * static_cast<std::size_t>(s.segments_per_episode);
    for (const auto& series : normalized_series) {
        if (series.size() < intervals) {
            throw std::invalid_argument("build_offset_schedule: series of length " + std::to_string(series.size()) +
                                        " is shorter than the " + std::to_string(intervals) + " intervals required");
        }
    }
    s.base.assign(intervals, std::array<double, 4>{});
    for (std::size_t k = 0; k < intervals; ++k) {
        for (std::size_t m = 0; m < mask.size(); ++m) {
            s.base[k][mask[m]] = range[mask[m]] * normalized_series[m][k];
        }
    }
    s.validate();
    return s;
}

void write_schedule_csv(const std::string& path, const OffsetSchedule& schedule) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "episode,segment,dim,offset\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    const auto segs = static_cast<std::size_t>(schedule.segments_per_episode);
    for (std::size_t k = 0; k < schedule.base.size(); ++k) {
        const auto b = schedule.interval_offset(k);
        for (auto d : schedule.mask) out << k / segs << ',' << k % segs << ',' << d << ',' << b[d] << '\n';
    }
}

}  // namespace forl::maze
