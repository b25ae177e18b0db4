#pragma once

#include <span>
#include <vector>

namespace forl::diffusion {

/// Variance-preserving schedule with
///   alpha(n) = exp(-(beta_min / N + (beta_max - beta_min) * (2n - 1) / (2 N^2)))
/// and alpha_bar(n) = prod_{i<=n} alpha(i). Steps are 1-based.
struct VpSchedule {
    int steps = 10;
    double beta_min = 0.1;
    double beta_max = 10.0;

    void validate() const;
};

double vp_alpha(int n, const VpSchedule& schedule);
double alpha_bar(int n, const VpSchedule& schedule);

/// sqrt(alpha_bar(n)) * s0 + sqrt(1 - alpha_bar(n)) * eps
std::vector<double> forward_noise(std::span<const double> s0, int n, std::span<const double> eps,
                                  const VpSchedule& schedule);

/// One ancestral denoising step:
///   s_n / sqrt(alpha) - (1 - alpha) / sqrt(alpha (1 - alpha_bar)) * eps_pred + sqrt(1 - alpha) * noise
/// The noise term is dropped at n = 1 whatever `noise` holds.
std::vector<double> reverse_step(std::span<const double> s_n, std::span<const double> eps_pred, int n,
                                 std::span<const double> noise, const VpSchedule& schedule);

/// alpha(n) and alpha_bar(n) for n = 1..N, precomputed.
class ScheduleTable {
public:
    explicit ScheduleTable(const VpSchedule& schedule);

    const VpSchedule& schedule() const { return schedule_; }
    double alpha(int n) const { return alpha_[static_cast<std::size_t>(n - 1)]; }
    double alpha_bar(int n) const { return alpha_bar_[static_cast<std::size_t>(n - 1)]; }

private:
    VpSchedule schedule_;
    std::vector<double> alpha_;
    std::vector<double> alpha_bar_;
};

}  // namespace forl::diffusion
