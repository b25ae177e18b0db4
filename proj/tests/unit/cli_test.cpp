#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forl/cli/config.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

/// Fresh scratch directory for one test.
fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("forl_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CmdResult run_cli(const std::string& args, const fs::path& dir) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd =
        std::string(FORL_CLI_PATH) + " " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = trim(slurp(out));
    r.err = slurp(err);
    return r;
}

/// Small but complete configuration: tiny model, short protocol.
json tiny_config() {
    return {
        {"maze", "large"},
        {"series", {"synth-a"}},
        {"modes", {"oracle", "raw-obs", "forecast-mean"}},
        {"baseline", "forecast-mean"},
        {"block_episodes", 3},
        {"context", 8},
        {"blocks", 1},
        {"forecast_samples", 5},
        {"candidates", 4},
        {"window", 4},
        {"embed_dim", 8},
        {"hidden", {16, 16}},
        {"data", {{"episodes", 30}}},
        {"train", {{"steps", 300}, {"log_every", 100}, {"val_every", 100}, {"val_batch", 64}}},
    };
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
    const auto path = dir / name;
    std::ofstream(path) << j.dump(2);
    return path;
}

std::vector<std::string> lines_of(const fs::path& path) {
    std::vector<std::string> out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

/// Column `name` of a CSV file as strings.
std::vector<std::string> csv_column(const fs::path& path, const std::string& name) {
    const auto rows = lines_of(path);
    if (rows.empty()) return {};
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    const auto header = split(rows[0]);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return {};
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<std::string> out;
    for (std::size_t i = 1; i < rows.size(); ++i) out.push_back(split(rows[i]).at(col));
    return out;
}

/// Contents of every file below `root`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

}  // namespace

TEST(Cli, HelpListsCommandsAndFlags) {
    const auto dir = scratch("help");
    const auto top = run_cli("--help", dir);
    EXPECT_EQ(top.code, 0);
    for (const char* cmd : {"gen-data", "train", "eval", "sweep", "plot"}) {
        EXPECT_NE(top.out.find(cmd), std::string::npos) << cmd;
    }
    const auto sub = run_cli("eval --help", dir);
    EXPECT_EQ(sub.code, 0);
    for (const char* flag : {"--config", "--seed", "--jobs", "--out", "--mode", "--alpha", "--series", "--maze"}) {
        EXPECT_NE(sub.out.find(flag), std::string::npos) << flag;
    }
}

TEST(Cli, UnknownFlagAndUnknownConfigKeyExitTwo) {
    const auto dir = scratch("badargs");
    EXPECT_EQ(run_cli("eval --bogus", dir).code, 2);
    const auto cfg = write_config(dir, {{"not_a_field", 1}});
    const auto r = run_cli("eval --config " + cfg.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("not_a_field"), std::string::npos);
}

TEST(Cli, GenDataDefaultsToLargeDataset) {
    const auto dir = scratch("gendata");
    const auto r = run_cli("gen-data --out " + (dir / "runs").string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = lines_of(fs::path(r.out) / "dataset.jsonl");
    EXPECT_GE(lines.size(), 50000u);
    const auto cfg = forl::cli::config_from_json(json::parse(slurp(fs::path(r.out) / "config.json")));
    EXPECT_EQ(cfg.maze, "large");
}

TEST(Cli, GenDataRepeatIsByteIdentical) {
    const auto dir = scratch("gendata_repeat");
    const auto cfg = write_config(dir, tiny_config());
    const auto args = "gen-data --config " + cfg.string() + " --out " + dir.string();
    const auto a = run_cli(args + " --seed 3", dir);
    ASSERT_EQ(a.code, 0) << a.err;
    const auto first = snapshot(a.out);
    const auto b = run_cli(args + " --seed 3", dir);
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(first, snapshot(b.out));
    const auto c = run_cli(args + " --seed 4", dir);
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_NE(a.out, c.out);
    EXPECT_NE(slurp(fs::path(a.out) / "dataset.jsonl"), slurp(fs::path(c.out) / "dataset.jsonl"));
}

TEST(Cli, MissingMazeExitsTwoNamingThePath) {
    const auto dir = scratch("nomaze");
    const auto r = run_cli("gen-data --maze /no/such/maze.txt --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("/no/such/maze.txt"), std::string::npos) << r.err;
}

TEST(Cli, TrainSmokeRunWritesCheckpointAndLosses) {
    const auto dir = scratch("train_smoke");
    auto j = tiny_config();
    j.erase("embed_dim");
    j.erase("hidden");
    j.erase("window");
    j["data"] = {{"episodes", 100}};
    j["train"] = {{"steps", 1000}, {"log_every", 100}, {"val_every", 250}, {"val_batch", 256}};
    const auto cfg = write_config(dir, j);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_cli("train --config " + cfg.string() + " --out " + dir.string(), dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 60.0);
    EXPECT_TRUE(fs::exists(fs::path(r.out) / "checkpoint.json"));
    const auto steps = csv_column(fs::path(r.out) / "loss.csv", "step");
    ASSERT_EQ(steps.size(), 10u);
    for (std::size_t i = 0; i < steps.size(); ++i) EXPECT_EQ(steps[i], std::to_string(i * 100));
    const auto val_steps = csv_column(fs::path(r.out) / "validation.csv", "step");
    EXPECT_EQ(val_steps, (std::vector<std::string>{"250", "500", "750", "1000"}));
}

TEST(Cli, ResumeReproducesUninterruptedRun) {
    const auto dir = scratch("resume");
    const auto cfg = write_config(dir, tiny_config());
    const auto base = "train --config " + cfg.string();

    const auto full = run_cli(base + " --steps 400 --out " + (dir / "full").string(), dir);
    ASSERT_EQ(full.code, 0) << full.err;
    const auto half = run_cli(base + " --steps 200 --out " + (dir / "half").string(), dir);
    ASSERT_EQ(half.code, 0) << half.err;
    const auto half_ck = (fs::path(half.out) / "checkpoint.json").string();
    const auto resumed =
        run_cli(base + " --steps 400 --resume --checkpoint " + half_ck + " --out " + (dir / "resumed").string(), dir);
    ASSERT_EQ(resumed.code, 0) << resumed.err;

    for (const char* file : {"checkpoint.json", "loss.csv", "validation.csv"}) {
        EXPECT_EQ(slurp(fs::path(full.out) / file), slurp(fs::path(resumed.out) / file)) << file;
    }
    EXPECT_EQ(csv_column(fs::path(resumed.out) / "loss.csv", "step"),
              (std::vector<std::string>{"0", "100", "200", "300"}));
}

TEST(Cli, ResumeWithoutOptimizerStateFails) {
    const auto dir = scratch("resume_missing");
    const auto cfg = write_config(dir, tiny_config());
    const auto r = run_cli("train --resume --config " + cfg.string() + " --out " + dir.string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("checkpoint"), std::string::npos) << r.err;
}

TEST(Cli, DivergingTrainingExitsNonZero) {
    const auto dir = scratch("nan");
    auto j = tiny_config();
    j["train"]["lr"] = 1e300;
    const auto r = run_cli("train --config " + write_config(dir, j).string() + " --out " + dir.string(), dir);
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("non-finite"), std::string::npos) << r.err;
}

TEST(Cli, OracleEvalHasZeroError) {
    const auto dir = scratch("eval_oracle");
    const auto cfg = write_config(dir, tiny_config());
    const auto r = run_cli("eval --mode oracle --config " + cfg.string() + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto errs = csv_column(fs::path(r.out) / "summary.csv", "err_mean");
    ASSERT_FALSE(errs.empty());
    for (const auto& v : errs) EXPECT_EQ(v, "0");
}

TEST(Cli, EvalRepeatIsByteIdentical) {
    const auto dir = scratch("eval_repeat");
    const auto cfg = write_config(dir, tiny_config());
    const auto args = "eval --seed 5 --config " + cfg.string() + " --out " + dir.string();
    const auto a = run_cli(args + " --jobs 2", dir);
    ASSERT_EQ(a.code, 0) << a.err;
    const auto first = snapshot(a.out);
    const auto b = run_cli(args + " --jobs 2", dir);
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(first, snapshot(b.out));

    const auto c = run_cli(args + " --jobs 1", dir);
    ASSERT_EQ(c.code, 0) << c.err;
    auto single = snapshot(c.out);
    auto multi = first;
    single.erase("config.json");
    multi.erase("config.json");
    EXPECT_EQ(single, multi);
}

TEST(Cli, ComparisonHasRowsPerModeAgainstBaseline) {
    const auto dir = scratch("compare");
    const auto cfg = write_config(dir, tiny_config());
    const auto r = run_cli("eval --config " + cfg.string() + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto modes = csv_column(fs::path(r.out) / "comparison.csv", "mode");
    const auto metrics = csv_column(fs::path(r.out) / "comparison.csv", "metric");
    const auto baselines = csv_column(fs::path(r.out) / "comparison.csv", "baseline");
    EXPECT_EQ(modes, (std::vector<std::string>{"oracle", "oracle", "raw-obs", "raw-obs"}));
    EXPECT_EQ(metrics, (std::vector<std::string>{"score", "error", "score", "error"}));
    for (const auto& b : baselines) EXPECT_EQ(b, "forecast-mean");
    EXPECT_EQ(lines_of(fs::path(r.out) / "summary.csv").size(), 4u);
    EXPECT_TRUE(fs::exists(fs::path(r.out) / "logs" / "synth-a_raw-obs_s0.jsonl"));
}

TEST(Cli, MismatchedCheckpointIsRefused) {
    const auto dir = scratch("mismatch");
    const auto cfg = write_config(dir, tiny_config());
    auto j = tiny_config();
    j["train"]["steps"] = 10;
    const auto t = run_cli("train --config " + write_config(dir, j, "t.json").string() + " --out " + dir.string(), dir);
    ASSERT_EQ(t.code, 0) << t.err;
    auto other = tiny_config();
    other["window"] = 6;
    other["checkpoint"] = (fs::path(t.out) / "checkpoint.json").string();
    const auto r = run_cli("eval --mode forl-dcm --config " + write_config(dir, other, "e.json").string() + " --out " +
                               dir.string(),
                           dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("w=6"), std::string::npos) << r.err;
}

TEST(Cli, ModelModesRequireCheckpoint) {
    const auto dir = scratch("needck");
    const auto r = run_cli("eval --mode forl-dcm --config " + write_config(dir, tiny_config()).string(), dir);
    EXPECT_EQ(r.code, 2);
}

TEST(Cli, SweepCoversDefaultGrid) {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir, tiny_config());
    const auto r = run_cli("sweep --mode oracle,raw-obs --config " + cfg.string() + " --out " + dir.string(), dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto alphas = csv_column(fs::path(r.out) / "sweep_synth-a.csv", "alpha");
    EXPECT_EQ(alphas, (std::vector<std::string>{"0", "0", "0.25", "0.25", "0.5", "0.5", "0.75", "0.75", "1", "1"}));
    EXPECT_TRUE(fs::exists(fs::path(r.out) / "sweep_synth-a_lines.svg"));
    EXPECT_EQ(lines_of(fs::path(r.out) / "runs_synth-a.csv").size(), 11u);
}

TEST(Cli, PlotMissingInputExitsTwo) {
    const auto dir = scratch("plot_missing");
    const auto r = run_cli("plot --input " + (dir / "absent.csv").string(), dir);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("absent.csv"), std::string::npos);
}

TEST(Cli, PlotIsIdempotent) {
    const auto dir = scratch("plot");
    const auto cfg = write_config(dir, tiny_config());
    const auto e = run_cli("eval --config " + cfg.string() + " --out " + dir.string(), dir);
    ASSERT_EQ(e.code, 0) << e.err;
    const auto summary = (fs::path(e.out) / "summary.csv").string();
    const auto out = dir / "plots";
    ASSERT_EQ(run_cli("plot --kind bars --input " + summary + " --out " + out.string(), dir).code, 0);
    const auto first_csv = slurp(out / "summary_bars.csv");
    const auto first_svg = slurp(out / "summary_bars.svg");
    ASSERT_EQ(run_cli("plot --kind bars --input " + summary + " --out " + out.string(), dir).code, 0);
    EXPECT_EQ(first_csv, slurp(out / "summary_bars.csv"));
    EXPECT_EQ(first_svg, slurp(out / "summary_bars.svg"));
    EXPECT_EQ(lines_of(out / "summary_bars.csv").size(), 4u);

    const auto log = (fs::path(e.out) / "logs" / "synth-a_raw-obs_s0.jsonl").string();
    const auto h = run_cli("plot --kind histogram --input " + log + " --out " + out.string(), dir);
    ASSERT_EQ(h.code, 0) << h.err;
    EXPECT_TRUE(fs::exists(out / "synth-a_raw-obs_s0_histogram.svg"));
}

TEST(Cli, RunDirectoryDependsOnConfigNotOnJobs) {
    const auto dir = scratch("rundir");
    const auto cfg = write_config(dir, tiny_config());
    const auto a = run_cli("gen-data --jobs 1 --config " + cfg.string() + " --out " + dir.string(), dir);
    const auto b = run_cli("gen-data --jobs 3 --config " + cfg.string() + " --out " + dir.string(), dir);
    const auto c = run_cli("gen-data --maze four_corridor --config " + cfg.string() + " --out " + dir.string(), dir);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
}
