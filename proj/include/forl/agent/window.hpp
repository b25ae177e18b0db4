#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace forl::agent {

/// The most recent (delta-observation, action) pairs of an episode, oldest first.
class TrajWindow {
public:
    TrajWindow(std::size_t capacity, std::size_t obs_dim = 4, std::size_t action_dim = 2);

    /// Appends the newest pair and drops the oldest once more than capacity are held.
    void push(std::span<const double> delta_obs, std::span<const double> action);
    void clear() { entries_.clear(); }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool full() const { return entries_.size() == capacity_; }
    std::size_t entry_dim() const { return obs_dim_ + action_dim_; }

    /// Entry i (0 = oldest) as [delta_obs, action].
    const std::vector<double>& entry(std::size_t i) const { return entries_.at(i); }

    /// Concatenation of all entries, oldest first.
    std::vector<double> flatten() const;

private:
    std::size_t capacity_;
    std::size_t obs_dim_;
    std::size_t action_dim_;
    std::deque<std::vector<double>> entries_;
};

}  // namespace forl::agent
