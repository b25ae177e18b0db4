#include "forl/agent/window.hpp"

#include <stdexcept>

namespace forl::agent {

TrajWindow::TrajWindow(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
    if (capacity == 0) throw std::invalid_argument("TrajWindow: capacity must be >= 1");
}

void TrajWindow::push(std::span<const double> delta_obs, std::span<const double> action) {
    if (delta_obs.size() != obs_dim_ || action.size() != action_dim_) {
        throw std::invalid_argument("TrajWindow::push: entry has the wrong width");
    }
    std::vector<double> e(delta_obs.begin(), delta_obs.end());
    e.insert(e.end(), action.begin(), action.end());
    entries_.push_back(std::move(e));
    if (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<double> TrajWindow::flatten() const {
    std::vector<double> out;
    out.reserve(entries_.size() * entry_dim());
    for (const auto& e : entries_) out.insert(out.end(), e.begin(), e.end());
    return out;
}

}  // namespace forl::agent
