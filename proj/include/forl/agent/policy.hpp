#pragma once

#include <vector>

#include "forl/maze/maze.hpp"

namespace forl::agent {

/// Scripted controller settings. The desired velocity points at the current
/// waypoint with speed min(cruise_speed, kp * distance); the action holds
/// that velocity through a damping-compensating feedforward term plus kv
/// times the velocity error.
struct ControllerGains {
    double cruise_speed = 0.2;
    double kp = 0.5;
    double kv = 3.0;
};

/// Steps from every free cell to `target` along 4-connected free cells;
/// -1 marks walls and unreachable cells. Indexed row * cols + col.
std::vector<int> bfs_distances(const maze::Maze& maze, maze::GridCell target);

/// Free cell nearest to `pos`: its own cell when free, otherwise the free
/// cell whose centre is closest (lowest row, then column, on ties).
maze::GridCell nearest_free_cell(const maze::Maze& maze, const maze::Vec2& pos);

/// Expert controller acting on a believed state. The believed position is
/// clamped into the maze, a shortest path to `goal` is found by BFS on the
/// free-cell graph and the action steers toward the next cell on that path
/// (or the goal centre once inside the goal cell). Returns a zero action when
/// the belief is already within the goal radius or the goal is unreachable.
maze::Action scripted_policy(const maze::Maze& maze, const maze::SimState& believed, maze::GridCell goal,
                             const ControllerGains& gains = {});

/// scripted_policy toward the maze's own goal cell.
maze::Action scripted_policy(const maze::Maze& maze, const maze::SimState& believed,
                             const ControllerGains& gains = {});

}  // namespace forl::agent
