#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace forl::num {

struct AdamConfig {
    double lr = 9e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    static AdamState fresh(std::size_t n, AdamConfig config = {});
};

/// One bias-corrected Adam update applied in place. Throws
/// std::domain_error if any gradient is non-finite (params untouched).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace forl::num
