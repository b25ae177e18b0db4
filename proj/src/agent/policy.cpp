#include "forl/agent/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

namespace forl::agent {

namespace {

constexpr std::array<std::array<int, 2>, 4> kMoves{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

maze::Vec2 center(maze::GridCell c) { return {c.col + 0.5, c.row + 0.5}; }

}  // namespace

std::vector<int> bfs_distances(const maze::Maze& maze, maze::GridCell target) {
    std::vector<int> dist(static_cast<std::size_t>(maze.rows() * maze.cols()), -1);
    if (maze.is_wall(target.row, target.col)) return dist;
    auto at = [&](int r, int c) -> int& { return dist[static_cast<std::size_t>(r * maze.cols() + c)]; };
    std::queue<maze::GridCell> q;
    at(target.row, target.col) = 0;
    q.push(target);
    while (!q.empty()) {
        const auto c = q.front();
        q.pop();
        for (const auto& m : kMoves) {
            const int r = c.row + m[0], col = c.col + m[1];
            if (maze.is_wall(r, col) || at(r, col) >= 0) continue;
            at(r, col) = at(c.row, c.col) + 1;
            q.push({r, col});
        }
    }
    return dist;
}

maze::GridCell nearest_free_cell(const maze::Maze& maze, const maze::Vec2& pos) {
    const auto own = maze.cell_of(pos);
    if (!maze.is_wall(own.row, own.col)) return own;
    maze::GridCell best = maze.free_cells().front();
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& c : maze.free_cells()) {
        const auto m = center(c);
        const double d = (m[0] - pos[0]) * (m[0] - pos[0]) + (m[1] - pos[1]) * (m[1] - pos[1]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

maze::Action scripted_policy(const maze::Maze& maze, const maze::SimState& believed, maze::GridCell goal,
                             const ControllerGains& gains) {
    const auto lo = maze.state_min();
    const auto hi = maze.state_max();
    maze::Vec2 pos{std::isfinite(believed.pos[0]) ? std::clamp(believed.pos[0], lo[0], hi[0]) : lo[0],
                   std::isfinite(believed.pos[1]) ? std::clamp(believed.pos[1], lo[1], hi[1]) : lo[1]};
    maze::Vec2 vel{std::isfinite(believed.vel[0]) ? believed.vel[0] : 0.0,
                   std::isfinite(believed.vel[1]) ? believed.vel[1] : 0.0};
    const auto g = center(goal);
    if (std::hypot(pos[0] - g[0], pos[1] - g[1]) < maze.params().goal_radius) return {0.0, 0.0};

    const auto hops = bfs_distances(maze, goal);
    auto d_at = [&](maze::GridCell c) { return hops[static_cast<std::size_t>(c.row * maze.cols() + c.col)]; };
    const auto here = nearest_free_cell(maze, pos);
    if (d_at(here) < 0) return {0.0, 0.0};

    auto next_of = [&](maze::GridCell c) {
        for (const auto& m : kMoves) {
            const maze::GridCell n{c.row + m[0], c.col + m[1]};
            if (!maze.is_wall(n.row, n.col) && d_at(n) == d_at(c) - 1) return n;
        }
        return c;
    };
    maze::Vec2 target = g;
    if (d_at(here) > 0) {
        const auto next = next_of(here);
        target = center(next);
        if (d_at(next) > 0) {
            const auto after = next_of(next);
            const bool straight = after.row - next.row == next.row - here.row && after.col - next.col == next.col - here.col;
            if (straight) target = center(after);
        }
    }
    const auto& phys = maze.params();
    const double dx = target[0] - pos[0], dy = target[1] - pos[1];
    const double dist = std::hypot(dx, dy);
    const double speed = std::min(gains.cruise_speed, gains.kp * dist);
    const maze::Vec2 v_des = dist > 0.0 ? maze::Vec2{speed * dx / dist, speed * dy / dist} : maze::Vec2{0.0, 0.0};
    maze::Action a{};
    for (int i = 0; i < 2; ++i) {
        const double hold = (1.0 - phys.damping) / phys.gain * v_des[i];
        a[i] = std::clamp(hold + gains.kv * (v_des[i] - vel[i]), -1.0, 1.0);
    }
    return a;
}

maze::Action scripted_policy(const maze::Maze& maze, const maze::SimState& believed, const ControllerGains& gains) {
    return scripted_policy(maze, believed, maze.goal_cell(), gains);
}

}  // namespace forl::agent
