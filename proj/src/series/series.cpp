#include "forl/series/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace forl::series {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (cell.empty() || used != cell.size() || !std::isfinite(v)) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
    return v;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

void Series::validate() const {
    if (values.empty()) throw std::invalid_argument("empty series");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("series '" + name + "' has a non-finite value");
    }
}

Series load_series_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file '" + path + "'");
    Series s;
    s.name = path;
    std::size_t column = options.column_index;
    bool header_pending = options.header;
    if (!options.column.empty() && !options.header) {
        throw std::invalid_argument("selecting a column by name requires a header row");
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cells = split_csv(t);
        if (header_pending) {
            header_pending = false;
            if (!options.column.empty()) {
                const auto it = std::find(cells.begin(), cells.end(), options.column);
                if (it == cells.end()) {
                    throw std::runtime_error(path + ": no column named '" + options.column + "'");
                }
                column = static_cast<std::size_t>(it - cells.begin());
                s.name = options.column;
            } else if (column < cells.size()) {
                s.name = cells[column];
            }
            continue;
        }
        if (column >= cells.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing column " +
                                     std::to_string(column));
        }
        s.values.push_back(parse_number(cells[column], path, line_no));
    }
    if (s.values.empty()) throw std::runtime_error("empty series");
    return s;
}

NormalizationStats context_stats(const Series& s, std::size_t context_len) {
    if (context_len < 2) throw std::invalid_argument("normalize: context length must be >= 2");
    if (s.size() < context_len) {
        throw std::invalid_argument("normalize: series of length " + std::to_string(s.size()) +
                                    " is shorter than the context " + std::to_string(context_len));
    }
    NormalizationStats st;
    st.min = s.values[0];
    st.max = s.values[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < context_len; ++i) {
        sum += s.values[i];
        st.min = std::min(st.min, s.values[i]);
        st.max = std::max(st.max, s.values[i]);
    }
    st.mean = sum / static_cast<double>(context_len);
    if (!(st.max > st.min)) throw std::invalid_argument("constant context");
    return st;
}

Series normalize_with(const Series& s, const NormalizationStats& stats) {
    if (!(stats.range() > 0.0)) throw std::invalid_argument("constant context");
    Series out{s.values, s.name};
    for (double& v : out.values) v = (v - stats.mean) / stats.range();
    return out;
}

Series denormalize_with(const Series& s, const NormalizationStats& stats) {
    Series out{s.values, s.name};
    for (double& v : out.values) v = v * stats.range() + stats.mean;
    return out;
}

Series normalize(const Series& s, std::size_t context_len) { return normalize_with(s, context_stats(s, context_len)); }

Series affine_scale_transform(const Series& s, double beta, std::size_t context_len) {
    const auto st = context_stats(s, context_len);
    Series out{s.values, s.name};
    for (double& v : out.values) v = 1.0 - beta + beta * std::exp((v - st.mean) / (2.0 * st.range()));
    return out;
}

std::string to_string(SynthKind k) {
    switch (k) {
        case SynthKind::seasonal: return "seasonal";
        case SynthKind::trend_seasonal: return "trend+seasonal";
        case SynthKind::random_walk: return "random-walk";
        case SynthKind::regime_switch: return "regime-switch";
    }
    return "?";
}

SynthKind synth_kind_from_string(const std::string& s) {
    if (s == "seasonal") return SynthKind::seasonal;
    if (s == "trend+seasonal") return SynthKind::trend_seasonal;
    if (s == "random-walk") return SynthKind::random_walk;
    if (s == "regime-switch") return SynthKind::regime_switch;
    throw std::invalid_argument("unknown series kind '" + s + "'");
}

Series synth_series(SynthKind kind, const SynthParams& p, std::size_t length, num::Rng& rng) {
    if (length < 1) throw std::invalid_argument("synth_series: length must be >= 1");
    Series s;
    s.name = to_string(kind);
    s.values.resize(length);
    const double two_pi = 2.0 * std::numbers::pi;
    switch (kind) {
        case SynthKind::seasonal:
        case SynthKind::trend_seasonal: {
            if (!(p.period > 0.0)) throw std::invalid_argument("synth_series: period must be positive");
            const double slope = kind == SynthKind::trend_seasonal ? p.slope : 0.0;
            for (std::size_t t = 0; t < length; ++t) {
                const double td = static_cast<double>(t);
                double v = p.level + p.amplitude * std::sin(two_pi * td / p.period + p.phase) + slope * td;
                if (p.noise_std > 0.0) v += p.noise_std * rng.gaussian();
                s.values[t] = v;
            }
            break;
        }
        case SynthKind::random_walk: {
            double x = p.level;
            for (std::size_t t = 0; t < length; ++t) {
                if (t > 0 && p.step_std > 0.0) x += p.step_std * rng.gaussian();
                double v = x;
                if (p.noise_std > 0.0) v += p.noise_std * rng.gaussian();
                s.values[t] = v;
            }
            break;
        }
        case SynthKind::regime_switch: {
            if (p.regime_levels.empty()) throw std::invalid_argument("synth_series: no regime levels");
            std::size_t regime = 0;
            for (std::size_t t = 0; t < length; ++t) {
                if (t > 0 && rng.uniform() < p.switch_prob) regime = (regime + 1) % p.regime_levels.size();
                double v = p.regime_levels[regime];
                if (p.noise_std > 0.0) v += p.noise_std * rng.gaussian();
                s.values[t] = v;
            }
            break;
        }
    }
    return s;
}

const std::vector<SynthPreset>& synth_presets() {
    static const std::vector<SynthPreset> presets = [] {
        std::vector<SynthPreset> v;
        SynthParams a0;
        a0.period = 12;
        a0.noise_std = 0.1;
        SynthParams a1 = a0;
        a1.period = 8;
        a1.phase = 1.3;
        v.push_back({"synth-a", SynthKind::seasonal, {a0, a1}});

        SynthParams b0;
        b0.period = 10;
        b0.slope = 0.015;
        b0.noise_std = 0.1;
        SynthParams b1 = b0;
        b1.slope = -0.01;
        b1.phase = 2.0;
        v.push_back({"synth-b", SynthKind::trend_seasonal, {b0, b1}});

        SynthParams c0;
        c0.step_std = 0.3;
        c0.noise_std = 0.0;
        v.push_back({"synth-c", SynthKind::random_walk, {c0, c0}});

        SynthParams d0;
        d0.regime_levels = {-1.0, 0.4, 1.2};
        d0.switch_prob = 0.12;
        d0.noise_std = 0.1;
        SynthParams d1 = d0;
        d1.regime_levels = {0.8, -0.6};
        d1.switch_prob = 0.08;
        v.push_back({"synth-d", SynthKind::regime_switch, {d0, d1}});

        SynthParams e0;
        e0.period = 24;
        e0.noise_std = 0.3;
        SynthParams e1 = e0;
        e1.period = 6;
        e1.phase = 0.7;
        v.push_back({"synth-e", SynthKind::seasonal, {e0, e1}});
        return v;
    }();
    return presets;
}

const SynthPreset& synth_preset(const std::string& name) {
    for (const auto& p : synth_presets()) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown synthetic series preset '" + name + "'");
}

std::vector<Series> generate_preset(const std::string& name, std::size_t dims, std::size_t length,
                                    std::uint64_t seed) {
    const auto& preset = synth_preset(name);
    std::vector<Series> out;
    for (std::size_t d = 0; d < dims; ++d) {
        num::Rng rng(seed ^ fnv1a(name), d);
        auto s = synth_series(preset.kind, preset.per_dim[d % preset.per_dim.size()], length, rng);
        s.name = name + "/" + std::to_string(d);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace forl::series
