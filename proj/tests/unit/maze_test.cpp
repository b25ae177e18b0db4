#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "forl/maze/maze.hpp"
#include "forl/maze/offsets.hpp"

using namespace forl;
using namespace forl::maze;

namespace {

const char* kOpen2x2 = "####\n#..#\n#.G#\n####\n";
const char* kCorridor = "#######\n#....G#\n#######\n";

double wall_distance(const Maze& m, const Vec2& p) {
    double best = 1e9;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (!m.is_wall(i, j)) continue;
            const double dx = std::max({j - p[0], 0.0, p[0] - (j + 1)});
            const double dy = std::max({i - p[1], 0.0, p[1] - (i + 1)});
            best = std::min(best, std::max(dx, dy));
        }
    }
    return best;
}

}  // namespace

TEST(Maze, ParseAndQuery) {
    const Maze m = Maze::parse(kOpen2x2);
    EXPECT_EQ(m.rows(), 4);
    EXPECT_EQ(m.cols(), 4);
    EXPECT_EQ(m.free_cells().size(), 4u);
    EXPECT_EQ(m.cell(2, 2), Cell::goal);
    EXPECT_TRUE(m.is_wall(0, 0));
    EXPECT_TRUE(m.is_wall(-1, 5));
    EXPECT_DOUBLE_EQ(m.goal()[0], 2.5);
    EXPECT_DOUBLE_EQ(m.goal()[1], 2.5);
    EXPECT_EQ(m.to_string(), kOpen2x2);
}

TEST(Maze, ParseErrors) {
    EXPECT_THROW(Maze::parse(""), std::invalid_argument);
    EXPECT_THROW(Maze::parse("###\n#.#\n###\n"), std::invalid_argument);
    EXPECT_THROW(Maze::parse("#.#\n#G#\n###\n"), std::invalid_argument);
    EXPECT_THROW(Maze::parse("###\n#x#\n###\n"), std::invalid_argument);
    EXPECT_THROW(Maze::parse("####\n#G#\n###\n"), std::invalid_argument);
    EXPECT_THROW(Maze::load("/nonexistent/maze.txt"), std::runtime_error);
}

TEST(Maze, BundledMazesLoad) {
    const Maze large = Maze::load(bundled_maze_path("large"));
    EXPECT_EQ(large.rows(), 9);
    EXPECT_EQ(large.cols(), 12);
    EXPECT_EQ(large.goal_cell(), (GridCell{7, 9}));
    const Maze four = Maze::load(bundled_maze_path("four_corridor"));
    EXPECT_EQ(four.rows(), 6);
}

TEST(Reset, UniformOverOpenMaze) {
    const Maze m = Maze::parse(kOpen2x2);
    num::Rng rng(1, 0);
    int counts[2][2] = {{0, 0}, {0, 0}};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto s = reset(m, rng);
        EXPECT_EQ(s.vel[0], 0.0);
        ++counts[static_cast<int>(s.pos[1]) - 1][static_cast<int>(s.pos[0]) - 1];
    }
    for (auto& row : counts) {
        for (int c : row) EXPECT_NEAR(c / double(n), 0.25, 0.05 * 0.25);
    }
}

TEST(Reset, SingleCellAndDeterminism) {
    const Maze m = Maze::parse("###\n#G#\n###\n");
    num::Rng rng(2, 0);
    for (int i = 0; i < 100; ++i) {
        const auto s = reset(m, rng);
        EXPECT_EQ(m.cell_of(s.pos), (GridCell{1, 1}));
    }
    const Maze big = Maze::load(bundled_maze_path("large"));
    num::Rng a(3, 0), b(3, 0);
    const auto sa = reset(big, a), sb = reset(big, b);
    EXPECT_EQ(sa.pos, sb.pos);
}

TEST(Step, RestStaysPut) {
    const Maze m = Maze::parse(kCorridor);
    SimState s{{2.5, 1.5}, {0.0, 0.0}};
    const auto r = step(m, s, {0.0, 0.0}, 0);
    EXPECT_EQ(r.state.pos, s.pos);
    EXPECT_FALSE(r.done);
    EXPECT_EQ(r.reward, 0.0);
}

TEST(Step, VelocityUpdateAndClamp) {
    const Maze m = Maze::parse(kCorridor);
    SimState s{{2.5, 1.5}, {0.1, 0.0}};
    const auto r = step(m, s, {1.0, 0.0}, 0);
    EXPECT_DOUBLE_EQ(r.state.vel[0], 0.9 * 0.1 + 0.15);
    EXPECT_DOUBLE_EQ(r.state.pos[0], 2.5 + 0.9 * 0.1 + 0.15);
    SimState fast{{2.5, 1.5}, {0.5, 0.0}};
    EXPECT_DOUBLE_EQ(step(m, fast, {5.0, 0.0}, 0).state.vel[0], 0.5);
}

TEST(Step, FlushAgainstWallBlocksAxis) {
    const Maze m = Maze::parse(kCorridor);
    const double r = m.params().agent_radius;
    SimState s{{1.0 + r + 1e-9, 1.5}, {0.0, 0.0}};
    const auto res = step(m, s, {-1.0, 0.0}, 0);
    EXPECT_EQ(res.state.vel[0], 0.0);
    EXPECT_NEAR(res.state.pos[0], s.pos[0], 1e-12);
    SimState up{{2.5, 2.0 - r - 1e-9}, {0.0, 0.2}};
    const auto res2 = step(m, up, {0.0, 1.0}, 0);
    EXPECT_EQ(res2.state.vel[1], 0.0);
    EXPECT_NEAR(res2.state.pos[1], up.pos[1], 1e-12);
}

TEST(Step, CollisionClampsFlush) {
    const Maze m = Maze::parse(kCorridor);
    const double r = m.params().agent_radius;
    SimState s{{1.5, 1.5}, {-0.5, 0.0}};
    const auto res = step(m, s, {-1.0, 0.0}, 0);
    EXPECT_EQ(res.state.vel[0], 0.0);
    EXPECT_NEAR(res.state.pos[0], 1.0 + r, 1e-8);
}

TEST(Step, GoalAndTimeLimit) {
    const Maze m = Maze::parse(kCorridor);
    SimState near_goal{{5.2, 1.5}, {0.0, 0.0}};
    const auto r = step(m, near_goal, {0.0, 0.0}, 0);
    EXPECT_TRUE(r.done);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.reward, 1.0);
    SimState far{{1.5, 1.5}, {0.0, 0.0}};
    EXPECT_TRUE(step(m, far, {0.0, 0.0}, m.params().max_steps - 1).done);
    EXPECT_FALSE(step(m, far, {0.0, 0.0}, m.params().max_steps - 2).done);
}

TEST(Step, RejectsCorruptedState) {
    const Maze m = Maze::parse(kCorridor);
    EXPECT_THROW(step(m, SimState{{0.5, 0.5}, {0, 0}}, {0, 0}, 0), std::invalid_argument);
}

TEST(Step, NeverInsideWall) {
    const Maze m = Maze::load(bundled_maze_path("large"));
    num::Rng rng(4, 0);
    auto s = reset(m, rng);
    for (int i = 0; i < 100000; ++i) {
        const Action a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto r = step(m, s, a, 0);
        s = r.state;
        ASSERT_GE(wall_distance(m, s.pos), m.params().agent_radius);
        ASSERT_LE(std::abs(s.vel[0]), m.params().v_max);
        if (i % 500 == 0) s = reset(m, rng);
    }
}

TEST(Observe, Cases) {
    OffsetSchedule sched;
    sched.base = {{3.0, -1.0, 0.0, 0.0}};
    const SimState s{{1.0, 2.0}, {0.1, 0.2}};
    const auto o = observe(s, sched, 0, 0);
    EXPECT_DOUBLE_EQ(o[0], 4.0);
    EXPECT_DOUBLE_EQ(o[1], 1.0);
    EXPECT_DOUBLE_EQ(o[2], 0.1);
    EXPECT_DOUBLE_EQ(o[3], 0.2);
    sched.alpha_scale = 0.0;
    EXPECT_EQ(observe(s, sched, 0, 0), s.vec());
    sched.alpha_scale = 1.0;
    sched.base = {{0.0, 0.0, 0.0, 0.0}};
    EXPECT_EQ(observe(s, sched, 0, 0), s.vec());
    EXPECT_THROW(observe(s, sched, 1, 0), std::out_of_range);
}

TEST(Observe, Affine) {
    const SimState s{{2.0, 2.0}, {0.3, 0.4}};
    const std::vector<std::size_t> mask{0, 1};
    EXPECT_EQ(affine_observe(s, 1.0, {0, 0, 0, 0}, mask), s.vec());
    const auto o = affine_observe(s, 0.5, {1, 1, 0, 0}, mask);
    EXPECT_DOUBLE_EQ(o[0], 2.0);
    EXPECT_DOUBLE_EQ(o[1], 2.0);
    EXPECT_DOUBLE_EQ(o[2], 0.3);
    OffsetSchedule sched;
    sched.base = {{1.0, -2.0, 0.0, 0.0}};
    EXPECT_EQ(affine_observe(s, 1.0, sched.base[0], mask), observe(s, sched, 0, 0));
    EXPECT_THROW(affine_observe(s, 0.0, {0, 0, 0, 0}, mask), std::invalid_argument);
}

TEST(OffsetSchedule, Build) {
    const std::array<double, 4> range{8.0, 6.0, 1.0, 1.0};
    const std::vector<std::vector<double>> series{{0.5, 0.5, 0.5}, {0.1, 0.2, 0.3}};
    const auto zero = build_offset_schedule(series, range, 0.0, OffsetMode::per_episode, 3);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(zero.offset(j, 0), (std::array<double, 4>{0, 0, 0, 0}));
    const auto s = build_offset_schedule(series, range, 0.5, OffsetMode::per_episode, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_DOUBLE_EQ(s.offset(j, 0)[0], 4.0 * 0.5);
        EXPECT_DOUBLE_EQ(s.offset(j, 0)[1], 0.5 * 6.0 * series[1][j]);
        EXPECT_EQ(s.offset(j, 0)[2], 0.0);
    }
    EXPECT_THROW(build_offset_schedule(series, range, 1.0, OffsetMode::per_episode, 4), std::invalid_argument);
    EXPECT_THROW(build_offset_schedule({series[0]}, range, 1.0, OffsetMode::per_episode, 3), std::invalid_argument);
}

TEST(OffsetSchedule, IntraEpisodeSegments) {
    const std::array<double, 4> range{1.0, 1.0, 1.0, 1.0};
    std::vector<double> v(8);
    for (int i = 0; i < 8; ++i) v[i] = i;
    const auto s = build_offset_schedule({v, v}, range, 1.0, OffsetMode::intra_episode, 2, {0, 1}, 50, 200);
    EXPECT_EQ(s.segments_per_episode, 4);
    EXPECT_EQ(s.offset(0, 49)[0], 0.0);
    EXPECT_EQ(s.offset(0, 50)[0], 1.0);
    EXPECT_EQ(s.offset(1, 199)[0], 7.0);
    EXPECT_THROW(s.offset(2, 0), std::out_of_range);
}

TEST(OffsetSchedule, DeltaObservationInvariance) {
    const Maze m = Maze::load(bundled_maze_path("large"));
    const std::array<double, 4> range = m.state_range();
    std::vector<double> a(12), b(12);
    for (int i = 0; i < 12; ++i) {
        a[i] = 0.3 * std::sin(i);
        b[i] = 0.2 * std::cos(i);
    }
    const auto per_ep = build_offset_schedule({a, b}, range, 1.0, OffsetMode::per_episode, 3);
    const auto intra = build_offset_schedule({a, b}, range, 1.0, OffsetMode::intra_episode, 3, {0, 1}, 50, 200);
    num::Rng rng(5, 0);
    auto s = reset(m, rng);
    for (int t = 1; t < 200; ++t) {
        const auto r = step(m, s, {rng.uniform(-1, 1), rng.uniform(-1, 1)}, t - 1);
        const auto o0 = observe(s, per_ep, 1, t - 1), o1 = observe(r.state, per_ep, 1, t);
        const auto sv0 = s.vec(), sv1 = r.state.vec();
        for (int d = 0; d < 4; ++d) EXPECT_NEAR(o1[d] - o0[d], sv1[d] - sv0[d], 1e-12);
        const auto i0 = observe(s, intra, 1, t - 1), i1 = observe(r.state, intra, 1, t);
        if (t % 50 != 0) {
            for (int d = 0; d < 4; ++d) EXPECT_NEAR(i1[d] - i0[d], sv1[d] - sv0[d], 1e-12);
        }
        s = r.state;
    }
}

TEST(OffsetSchedule, PartialIdentifiabilityWitness) {
    const Maze m = Maze::load(bundled_maze_path("large"));
    const Observation o{4.0, 3.0, 0.1, 0.0};
    for (const auto& c : m.free_cells()) {
        const Vec2 p{c.col + 0.5, c.row + 0.5};
        const std::array<double, 4> b{o[0] - p[0], o[1] - p[1], 0, 0};
        OffsetSchedule s;
        s.base = {b};
        const auto got = observe(SimState{p, {0.1, 0.0}}, s, 0, 0);
        EXPECT_NEAR(got[0], o[0], 1e-12);
        EXPECT_NEAR(got[1], o[1], 1e-12);
    }
}

TEST(OffsetSchedule, CsvExport) {
    const std::array<double, 4> range{2.0, 2.0, 1.0, 1.0};
    const auto s = build_offset_schedule({{0.25, 0.5}, {-0.25, 0.0}}, range, 1.0, OffsetMode::per_episode, 2);
    const auto path = (std::filesystem::temp_directory_path() / "forl_sched.csv").string();
    write_schedule_csv(path, s);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "episode,segment,dim,offset");
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,0,0.5");
    ++rows;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
    std::filesystem::remove(path);
}
