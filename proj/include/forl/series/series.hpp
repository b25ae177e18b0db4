#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "forl/numkit/rng.hpp"

namespace forl::series {

struct Series {
    std::vector<double> values;
    std::string name;

    std::size_t size() const { return values.size(); }
    void validate() const;
};

struct CsvOptions {
    /// First non-comment line is a header row and is skipped.
    bool header = false;
    /// Column selected by header name; empty selects by index.
    std::string column;
    std::size_t column_index = 0;
};

/// Reads one numeric column. Lines starting with '#' and blank lines are ignored.
Series load_series_csv(const std::string& path, const CsvOptions& options = {});

/// Mean, min and max of the first context_len values.
struct NormalizationStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;

    double range() const { return max - min; }
};

NormalizationStats context_stats(const Series& s, std::size_t context_len);

/// x' = (x - mean) / (max - min) with stats from the context prefix only,
/// applied to every value. Throws "constant context" when max == min.
Series normalize(const Series& s, std::size_t context_len);
Series normalize_with(const Series& s, const NormalizationStats& stats);
Series denormalize_with(const Series& s, const NormalizationStats& stats);

/// x' = 1 - beta + beta * exp((x - mean) / (2 (max - min))), context stats.
Series affine_scale_transform(const Series& s, double beta, std::size_t context_len);

enum class SynthKind { seasonal, trend_seasonal, random_walk, regime_switch };

std::string to_string(SynthKind k);
SynthKind synth_kind_from_string(const std::string& s);

/// Generative forms (t = 0, 1, ...; e_t ~ N(0, 1)):
///   seasonal:        level + amplitude sin(2 pi t / period + phase) + noise_std e_t
///   trend+seasonal:  seasonal + slope t
///   random-walk:     x_0 = level, x_t = x_{t-1} + step_std e_t, plus noise_std e'_t
///   regime-switch:   level_r(t) + noise_std e_t, the regime advancing to the next
///                    entry of regime_levels with probability switch_prob per step
struct SynthParams {
    double level = 0.0;
    double amplitude = 1.0;
    double period = 12.0;
    double phase = 0.0;
    double slope = 0.0;
    double noise_std = 0.0;
    double step_std = 1.0;
    double switch_prob = 0.1;
    std::vector<double> regime_levels{-1.0, 1.0};
};

Series synth_series(SynthKind kind, const SynthParams& params, std::size_t length, num::Rng& rng);

/// Named synthetic families standing in for real offset data sets. Each
/// preset yields one series per offset dimension.
struct SynthPreset {
    std::string name;
    SynthKind kind;
    std::vector<SynthParams> per_dim;
};

const std::vector<SynthPreset>& synth_presets();
const SynthPreset& synth_preset(const std::string& name);
/// Series for `dims` offset dimensions; dim d uses its own derived stream.
std::vector<Series> generate_preset(const std::string& name, std::size_t dims, std::size_t length,
                                    std::uint64_t seed);

}  // namespace forl::series
