#include "forl/numkit/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace forl::num {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::uint64_t sx = stream;
    std::uint64_t x = seed ^ splitmix64(sx);
    for (auto& w : s_) w = splitmix64(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return r % bound;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::vector<double> Rng::gaussian_vec(std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = gaussian();
    return v;
}

Rng Rng::derive(std::uint64_t stream) const {
    std::uint64_t x = seed_ ^ 0x6A09E667F3BCC909ULL;
    std::uint64_t mixed = splitmix64(x) ^ (stream_ * 0xD1B54A32D192ED03ULL);
    return Rng(mixed, stream);
}

Rng::State Rng::state() const { return State{s_, seed_, stream_, has_spare_, spare_}; }

Rng Rng::from_state(const State& st) {
    Rng r(st.seed, st.stream);
    r.s_ = st.words;
    r.has_spare_ = st.has_spare;
    r.spare_ = st.spare;
    return r;
}

}  // namespace forl::num
