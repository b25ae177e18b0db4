#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "forl/maze/maze.hpp"

namespace forl::maze {

using Observation = std::array<double, 4>;

enum class OffsetMode { per_episode, intra_episode };

std::string to_string(OffsetMode m);
OffsetMode offset_mode_from_string(const std::string& s);

/// Offsets b for a run of episodes. Interval k holds one offset vector; in
/// per-episode mode interval k is episode k, in intra-episode mode episode j
/// spans intervals j*S .. j*S + S - 1 with S = segments_per_episode and the
/// segment switching every `segment_length` steps. Stored offsets are
/// unscaled; alpha_scale multiplies them on every read.
struct OffsetSchedule {
    std::vector<std::array<double, 4>> base;
    std::vector<std::size_t> mask{0, 1};
    OffsetMode mode = OffsetMode::per_episode;
    int segment_length = 50;
    int segments_per_episode = 1;
    double alpha_scale = 1.0;

    std::size_t episodes() const;
    int segment(int t) const;
    std::size_t interval(std::size_t episode, int t) const;
    /// alpha_scale * b for episode j at step t.
    std::array<double, 4> offset(std::size_t episode, int t) const;
    std::array<double, 4> interval_offset(std::size_t interval) const;
    void validate() const;
};

/// o = s + alpha_scale * b(j, t).
Observation observe(const SimState& s, const OffsetSchedule& schedule, std::size_t episode, int t);

/// Masked dims: o_d = beta * s_d + b_d; other dims pass through.
Observation affine_observe(const SimState& s, double beta, const std::array<double, 4>& bias,
                           const std::vector<std::size_t>& mask);

/// One normalized series per masked dim (in mask order). Interval k of the
/// schedule uses series value k: b_d = range_d * series_d[k]; alpha_scale is
/// applied when offsets are read.
OffsetSchedule build_offset_schedule(const std::vector<std::vector<double>>& normalized_series,
                                     const std::array<double, 4>& range, double alpha_scale, OffsetMode mode,
                                     std::size_t episodes, const std::vector<std::size_t>& mask = {0, 1},
                                     int segment_length = 50, int max_steps = 200);

/// CSV with header "episode,segment,dim,offset"; one row per masked dim per interval.
void write_schedule_csv(const std::string& path, const OffsetSchedule& schedule);

}  // namespace forl::maze
