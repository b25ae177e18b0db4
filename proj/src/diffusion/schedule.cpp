#include "forl/diffusion/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace forl::diffusion {

namespace {

void check_step(int n, const VpSchedule& s) {
    if (n < 1 || n > s.steps) {
        throw std::out_of_range("diffusion step " + std::to_string(n) + " outside 1.." + std::to_string(s.steps));
    }
}

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

void VpSchedule::validate() const {
    if (steps < 1) throw std::invalid_argument("VpSchedule: steps must be >= 1");
    if (!(beta_min > 0.0) || !(beta_min < beta_max)) {
        throw std::invalid_argument("VpSchedule: require 0 < beta_min < beta_max");
    }
}

double vp_alpha(int n, const VpSchedule& s) {
    check_step(n, s);
    const double big_n = static_cast<double>(s.steps);
    const double exponent =
        s.beta_min / big_n + (s.beta_max - s.beta_min) * (2.0 * n - 1.0) / (2.0 * big_n * big_n);
    return std::exp(-exponent);
}

double alpha_bar(int n, const VpSchedule& s) {
    check_step(n, s);
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) prod *= vp_alpha(i, s);
    return prod;
}

std::vector<double> forward_noise(std::span<const double> s0, int n, std::span<const double> eps,
                                  const VpSchedule& schedule) {
    check_same_dim(s0.size(), eps.size(), "forward_noise");
    const double ab = alpha_bar(n, schedule);
    const double a = std::sqrt(ab);
    const double b = std::sqrt(1.0 - ab);
    std::vector<double> out(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i) out[i] = a * s0[i] + b * eps[i];
    return out;
}

std::vector<double> reverse_step(std::span<const double> s_n, std::span<const double> eps_pred, int n,
                                 std::span<const double> noise, const VpSchedule& schedule) {
    check_same_dim(s_n.size(), eps_pred.size(), "reverse_step");
    const double a = vp_alpha(n, schedule);
    const double ab = alpha_bar(n, schedule);
    const double inv_sqrt_a = 1.0 / std::sqrt(a);
    const double eps_coef = (1.0 - a) / std::sqrt(a * (1.0 - ab));
    const double sigma = std::sqrt(1.0 - a);
    const bool add_noise = n > 1;
    if (add_noise) check_same_dim(s_n.size(), noise.size(), "reverse_step");
    std::vector<double> out(s_n.size());
    for (std::size_t i = 0; i < s_n.size(); ++i) {
        out[i] = s_n[i] * inv_sqrt_a - eps_coef * eps_pred[i];
        if (add_noise) out[i] += sigma * noise[i];
    }
    return out;
}

ScheduleTable::ScheduleTable(const VpSchedule& schedule) : schedule_(schedule) {
    schedule_.validate();
    double prod = 1.0;
    for (int n = 1; n <= schedule_.steps; ++n) {
        const double a = vp_alpha(n, schedule_);
        prod *= a;
        alpha_.push_back(a);
        alpha_bar_.push_back(prod);
    }
}

}  // namespace forl::diffusion
