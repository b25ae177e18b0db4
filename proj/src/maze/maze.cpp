#include "forl/maze/maze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forl::maze {

namespace {

constexpr double kFlushGap = 1e-9;

double clamp_abs(double v, double limit) { return std::clamp(v, -limit, limit); }

}  // namespace

void PhysicsParams::validate() const {
    if (!(damping >= 0.0 && damping <= 1.0)) throw std::invalid_argument("physics: damping must lie in [0, 1]");
    if (!(gain > 0.0)) throw std::invalid_argument("physics: gain must be positive");
    if (!(v_max > 0.0 && v_max < 1.0)) throw std::invalid_argument("physics: v_max must lie in (0, 1)");
    if (!(agent_radius >= 0.0 && agent_radius < 0.5)) {
        throw std::invalid_argument("physics: agent radius must lie in [0, 0.5)");
    }
    if (!(goal_radius > 0.0)) throw std::invalid_argument("physics: goal radius must be positive");
    if (max_steps < 1) throw std::invalid_argument("physics: max_steps must be >= 1");
}

Maze Maze::parse(const std::string& text, PhysicsParams params) {
    params.validate();
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw std::invalid_argument("maze: empty layout");
    Maze m;
    m.params_ = params;
    m.rows_ = static_cast<int>(lines.size());
    m.cols_ = static_cast<int>(lines.front().size());
    int goals = 0;
    for (int i = 0; i < m.rows_; ++i) {
        const auto& row = lines[static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != m.cols_) {
            throw std::invalid_argument("maze: row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                        " columns, expected " + std::to_string(m.cols_));
        }
        for (int j = 0; j < m.cols_; ++j) {
            const char c = row[static_cast<std::size_t>(j)];
            Cell cell;
            if (c == '#') {
                cell = Cell::wall;
            } else if (c == '.') {
                cell = Cell::free;
            } else if (c == 'G') {
                cell = Cell::goal;
                m.goal_cell_ = {i, j};
                ++goals;
            } else {
                throw std::invalid_argument(std::string("maze: unexpected character '") + c + "'");
            }
            const bool border = i == 0 || j == 0 || i == m.rows_ - 1 || j == m.cols_ - 1;
            if (border && cell != Cell::wall) throw std::invalid_argument("maze: outer boundary must be wall");
            if (cell != Cell::wall) m.free_.push_back({i, j});
            m.grid_.push_back(cell);
        }
    }
    if (m.free_.empty()) throw std::invalid_argument("maze: no free cell");
    if (goals != 1) throw std::invalid_argument("maze: exactly one goal cell 'G' required");
    return m;
}

Maze Maze::load(const std::string& path, PhysicsParams params) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open maze file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), params);
}

Cell Maze::cell(int row, int col) const {
    if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return Cell::wall;
    return grid_[static_cast<std::size_t>(row * cols_ + col)];
}

bool Maze::is_wall(int row, int col) const { return cell(row, col) == Cell::wall; }

bool Maze::position_valid(const Vec2& pos) const {
    if (!std::isfinite(pos[0]) || !std::isfinite(pos[1])) return false;
    const double r = params_.agent_radius;
    const int c0 = static_cast<int>(std::floor(pos[0] - r));
    const int c1 = static_cast<int>(std::ceil(pos[0] + r)) - 1;
    const int r0 = static_cast<int>(std::floor(pos[1] - r));
    const int r1 = static_cast<int>(std::ceil(pos[1] + r)) - 1;
    for (int i = r0; i <= r1; ++i) {
        for (int j = c0; j <= c1; ++j) {
            if (is_wall(i, j)) return false;
        }
    }
    return true;
}

GridCell Maze::cell_of(const Vec2& pos) const {
    const int col = std::clamp(static_cast<int>(std::floor(pos[0])), 0, cols_ - 1);
    const int row = std::clamp(static_cast<int>(std::floor(pos[1])), 0, rows_ - 1);
    return {row, col};
}

std::array<double, 4> Maze::state_min() const {
    int rmin = rows_, cmin = cols_;
    for (const auto& c : free_) {
        rmin = std::min(rmin, c.row);
        cmin = std::min(cmin, c.col);
    }
    return {cmin + params_.agent_radius, rmin + params_.agent_radius, -params_.v_max, -params_.v_max};
}

std::array<double, 4> Maze::state_max() const {
    int rmax = 0, cmax = 0;
    for (const auto& c : free_) {
        rmax = std::max(rmax, c.row);
        cmax = std::max(cmax, c.col);
    }
    return {cmax + 1 - params_.agent_radius, rmax + 1 - params_.agent_radius, params_.v_max, params_.v_max};
}

std::array<double, 4> Maze::state_range() const {
    const auto lo = state_min();
    const auto hi = state_max();
    return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2], hi[3] - lo[3]};
}

std::string Maze::to_string() const {
    std::string out;
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            const Cell c = cell(i, j);
            out += c == Cell::wall ? '#' : (c == Cell::goal ? 'G' : '.');
        }
        out += '\n';
    }
    return out;
}

SimState reset(const Maze& maze, num::Rng& rng) {
    const auto lo = maze.state_min();
    const auto hi = maze.state_max();
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        const Vec2 p{rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1])};
        if (maze.position_valid(p)) return SimState{p, {0.0, 0.0}};
    }
    throw std::runtime_error("reset: no free space large enough for the agent");
}

bool at_goal(const Maze& maze, const Vec2& pos) {
    const Vec2 g = maze.goal();
    return std::hypot(pos[0] - g[0], pos[1] - g[1]) < maze.params().goal_radius;
}

StepResult step(const Maze& maze, const SimState& state, const Action& action, int t) {
    if (!maze.position_valid(state.pos) || !std::isfinite(state.vel[0]) || !std::isfinite(state.vel[1])) {
        throw std::invalid_argument("step: state lies outside free space");
    }
    const auto& p = maze.params();
    SimState next = state;
    for (int axis = 0; axis < 2; ++axis) {
        const double a = std::isfinite(action[axis]) ? std::clamp(action[axis], -1.0, 1.0) : 0.0;
        next.vel[axis] = clamp_abs(p.damping * state.vel[axis] + p.gain * a, p.v_max);
    }
    const double r = p.agent_radius;
    for (int axis = 0; axis < 2; ++axis) {
        const double v = next.vel[axis];
        if (v == 0.0) continue;
        Vec2 trial = next.pos;
        trial[axis] += v;
        if (maze.position_valid(trial)) {
            next.pos = trial;
            continue;
        }
        if (v > 0.0) {
            trial[axis] = std::floor(trial[axis] + r) - r - kFlushGap;
        } else {
            trial[axis] = std::floor(trial[axis] - r) + 1.0 + r + kFlushGap;
        }
        if (maze.position_valid(trial)) next.pos = trial;
        next.vel[axis] = 0.0;
    }
    StepResult out;
    out.state = next;
    out.success = at_goal(maze, next.pos);
    out.reward = out.success ? 1.0 : 0.0;
    out.done = out.success || t + 1 >= p.max_steps;
    return out;
}

std::string bundled_maze_path(const std::string& name) {
    return std::string(FORL_DATA_DIR) + "/mazes/" + name + ".txt";
}

}  // namespace forl::maze
