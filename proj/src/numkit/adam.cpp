#include "forl/numkit/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace forl::num {

AdamState AdamState::fresh(std::size_t n, AdamConfig config) {
    AdamState s;
    s.config = config;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment sizes differ");
    }
    for (double g : grads) {
        if (!std::isfinite(g)) throw std::domain_error("adam_step: non-finite gradient");
    }
    const auto& c = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

}  // namespace forl::num
