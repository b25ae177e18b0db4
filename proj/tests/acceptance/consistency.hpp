#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "forl/maze/maze.hpp"

namespace forl::acceptance {

/// One recorded transition of a window: state delta and applied action.
struct WindowStep {
    std::array<double, 4> delta{};
    maze::Action action{};
};

/// Brute-force set of positions consistent with a (delta, action) window
/// that started at rest. Every point of a `spacing` grid over free space is
/// used as a start, the actions are replayed with the maze physics and the
/// start is accepted when each replayed delta matches the recorded one within
/// `tol` per component. The consistent set holds the replayed end positions.
inline std::vector<maze::Vec2> consistent_positions(const maze::Maze& maze, const std::vector<WindowStep>& window,
                                                    double spacing = 0.25, double tol = 0.02) {
    std::vector<maze::Vec2> out;
    const int nx = static_cast<int>(std::round(maze.cols() / spacing));
    const int ny = static_cast<int>(std::round(maze.rows() / spacing));
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            maze::SimState s{{(ix + 0.5) * spacing, (iy + 0.5) * spacing}, {0.0, 0.0}};
            if (!maze.position_valid(s.pos)) continue;
            bool ok = true;
            for (std::size_t t = 0; t < window.size() && ok; ++t) {
                const auto r = maze::step(maze, s, window[t].action, static_cast<int>(t));
                const auto a = s.vec();
                const auto b = r.state.vec();
                for (std::size_t d = 0; d < 4 && ok; ++d) ok = std::abs((b[d] - a[d]) - window[t].delta[d]) <= tol;
                s = r.state;
                if (ok && r.done && t + 1 < window.size()) ok = false;
            }
            if (ok) out.push_back(s.pos);
        }
    }
    return out;
}

/// Region label per point: single-linkage components with link distance `link`.
inline std::vector<int> label_regions(const std::vector<maze::Vec2>& pts, double link) {
    std::vector<int> label(pts.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (label[i] >= 0) continue;
        label[i] = next;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < pts.size(); ++v) {
                if (label[v] < 0 && std::hypot(pts[u][0] - pts[v][0], pts[u][1] - pts[v][1]) <= link) {
                    label[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

/// Distance from `p` to the nearest point of `pts` and that point's index.
inline std::pair<double, std::size_t> nearest(const std::vector<maze::Vec2>& pts, const maze::Vec2& p) {
    double best = INFINITY;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::hypot(pts[i][0] - p[0], pts[i][1] - p[1]);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return {best, arg};
}

}  // namespace forl::acceptance
