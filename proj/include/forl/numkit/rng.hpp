#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace forl::num {

/// xoshiro256** seeded through SplitMix64.
///
/// A generator is identified by (seed, stream). Two generators with the same
/// pair produce the same sequence on every platform; the algorithm uses only
/// 64-bit integer arithmetic and a fixed uint64 -> double mapping.
class Rng {
public:
    static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi);

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the polar-free Box-Muller transform (pairs cached).
    double gaussian();
    std::vector<double> gaussian_vec(std::size_t dim);

    /// Independent generator keyed by (this generator's seed, stream id).
    Rng derive(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Full internal state, for checkpointing.
    struct State {
        std::array<std::uint64_t, 4> words{};
        std::uint64_t seed = 0;
        std::uint64_t stream = 0;
        bool has_spare = false;
        double spare = 0.0;
    };
    State state() const;
    static Rng from_state(const State& st);

private:
    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& x);

inline double gaussian(Rng& rng) { return rng.gaussian(); }
inline std::vector<double> gaussian_vec(Rng& rng, std::size_t dim) { return rng.gaussian_vec(dim); }

}  // namespace forl::num
