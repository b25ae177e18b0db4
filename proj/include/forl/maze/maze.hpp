#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "forl/numkit/rng.hpp"

namespace forl::maze {

using Vec2 = std::array<double, 2>;

/// Physical constants of the pointmass. All lengths are in maze units
/// (one grid cell = 1 unit), velocities in units per step.
struct PhysicsParams {
    double damping = 0.9;
    double gain = 0.15;
    double v_max = 0.5;
    double agent_radius = 0.15;
    double goal_radius = 0.5;
    int max_steps = 200;

    void validate() const;
};

enum class Cell { wall, free, goal };

/// Continuous pointmass state: position (x, y) and velocity (vx, vy).
/// x runs along grid columns and y along grid rows, so cell (row i, col j)
/// covers x in [j, j+1] and y in [i, i+1].
struct SimState {
    Vec2 pos{0.0, 0.0};
    Vec2 vel{0.0, 0.0};

    static constexpr std::size_t kDim = 4;
    std::array<double, 4> vec() const { return {pos[0], pos[1], vel[0], vel[1]}; }
    static SimState from_vec(const double* v) { return SimState{{v[0], v[1]}, {v[2], v[3]}}; }
};

using Action = Vec2;

struct GridCell {
    int row = 0;
    int col = 0;
    friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Wall grid plus physics. Parsed from ASCII: '#' wall, '.' free, 'G' goal.
class Maze {
public:
    static Maze parse(const std::string& text, PhysicsParams params = {});
    static Maze load(const std::string& path, PhysicsParams params = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Cell cell(int row, int col) const;
    bool is_wall(int row, int col) const;
    const PhysicsParams& params() const { return params_; }

    const std::vector<GridCell>& free_cells() const { return free_; }
    GridCell goal_cell() const { return goal_cell_; }
    /// Centre of the goal cell.
    Vec2 goal() const { return {goal_cell_.col + 0.5, goal_cell_.row + 0.5}; }

    /// True when the agent's square footprint (half-width = agent radius)
    /// overlaps no wall cell.
    bool position_valid(const Vec2& pos) const;
    /// Grid cell containing `pos`, clamped into the grid.
    GridCell cell_of(const Vec2& pos) const;

    /// Per state dimension (x, y, vx, vy): min and max attainable values.
    /// Positions span the bounding box of free space; velocities +-v_max.
    std::array<double, 4> state_min() const;
    std::array<double, 4> state_max() const;
    std::array<double, 4> state_range() const;

    std::string to_string() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Cell> grid_;
    std::vector<GridCell> free_;
    GridCell goal_cell_;
    PhysicsParams params_;
};

/// Uniform start over free space by rejection sampling; zero velocity.
SimState reset(const Maze& maze, num::Rng& rng);

struct StepResult {
    SimState state;
    double reward = 0.0;
    bool done = false;
    bool success = false;
};

/// One transition. `t` is the index of this step within the episode (0-based);
/// the episode ends at the goal or when t + 1 reaches max_steps.
StepResult step(const Maze& maze, const SimState& state, const Action& action, int t);

bool at_goal(const Maze& maze, const Vec2& pos);

/// Path of bundled maze files.
std::string bundled_maze_path(const std::string& name);

}  // namespace forl::maze
