#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "forl/series/series.hpp"

using namespace forl;
using namespace forl::series;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(SeriesCsv, PlainColumn) {
    const auto p = write_temp("forl_s1.csv", "1\n2\n3\n");
    EXPECT_EQ(load_series_csv(p).values, (std::vector<double>{1, 2, 3}));
}

TEST(SeriesCsv, EmptyFileIsError) {
    const auto p = write_temp("forl_s2.csv", "");
    try {
        load_series_csv(p);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "empty series");
    }
}

TEST(SeriesCsv, HeaderCommentsAndNamedColumns) {
    const auto p = write_temp("forl_s3.csv", "# generated\nvalue\n4\n# mid comment\n5\n");
    CsvOptions opt;
    opt.header = true;
    const auto s = load_series_csv(p, opt);
    EXPECT_EQ(s.values, (std::vector<double>{4, 5}));
    EXPECT_EQ(s.name, "value");
    EXPECT_THROW(load_series_csv(p), std::runtime_error);

    const auto q = write_temp("forl_s4.csv", "t,a,b\n0,1.5,-2\n1,2.5,-3\n");
    CsvOptions named;
    named.header = true;
    named.column = "b";
    EXPECT_EQ(load_series_csv(q, named).values, (std::vector<double>{-2, -3}));
    named.column = "zzz";
    EXPECT_THROW(load_series_csv(q, named), std::runtime_error);
}

TEST(SeriesCsv, Errors) {
    EXPECT_THROW(load_series_csv("/nonexistent/file.csv"), std::runtime_error);
    const auto p = write_temp("forl_s5.csv", "1\nabc\n");
    EXPECT_THROW(load_series_csv(p), std::runtime_error);
}

TEST(Normalize, Formula) {
    const Series s{{0, 5, 10}, ""};
    const auto n = normalize(s, 3);
    EXPECT_DOUBLE_EQ(n.values[0], -0.5);
    EXPECT_DOUBLE_EQ(n.values[1], 0.0);
    EXPECT_DOUBLE_EQ(n.values[2], 0.5);
}

TEST(Normalize, ConstantContextIsError) {
    try {
        normalize(Series{{2, 2, 2, 7}, ""}, 3);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "constant context");
    }
    EXPECT_THROW(normalize(Series{{1, 2}, ""}, 1), std::invalid_argument);
}

TEST(Normalize, UsesOnlyContextAndPreservesOrder) {
    num::Rng rng(1, 0);
    Series s = synth_series(SynthKind::random_walk, SynthParams{}, 50, rng);
    const auto st = context_stats(s, 20);
    Series mutated = s;
    for (std::size_t i = 20; i < 50; ++i) mutated.values[i] += 100.0 * (i % 3);
    const auto st2 = context_stats(mutated, 20);
    EXPECT_EQ(st.mean, st2.mean);
    EXPECT_EQ(st.min, st2.min);
    EXPECT_EQ(st.max, st2.max);
    const auto n = normalize(s, 20);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 50; ++j) {
            if (s.values[i] < s.values[j]) {
                EXPECT_LT(n.values[i], n.values[j]);
            }
        }
    }
    const auto back = denormalize_with(n, st);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(back.values[i], s.values[i], 1e-12);
}

TEST(AffineScale, Cases) {
    const Series s{{0, 5, 10, 20}, ""};
    const auto a = affine_scale_transform(s, 0.5, 3);
    EXPECT_EQ(a.values[1], 1.0);
    EXPECT_DOUBLE_EQ(a.values[3], 0.5 + 0.5 * std::exp(15.0 / 20.0));
    for (double v : a.values) EXPECT_GT(v, 0.0);
    for (double v : affine_scale_transform(s, 0.0, 3).values) EXPECT_EQ(v, 1.0);
}

TEST(Synth, SeasonalExactlyPeriodic) {
    num::Rng rng(2, 0);
    SynthParams p;
    p.period = 6;
    const auto s = synth_series(SynthKind::seasonal, p, 60, rng);
    for (std::size_t t = 6; t < 60; ++t) EXPECT_NEAR(s.values[t], s.values[t - 6], 1e-12);
}

TEST(Synth, RandomWalkZeroStepIsConstant) {
    num::Rng rng(3, 0);
    SynthParams p;
    p.step_std = 0.0;
    p.level = 2.5;
    for (double v : synth_series(SynthKind::random_walk, p, 30, rng).values) EXPECT_EQ(v, 2.5);
}

TEST(Synth, DeterministicPerSeed) {
    for (auto kind : {SynthKind::seasonal, SynthKind::trend_seasonal, SynthKind::random_walk, SynthKind::regime_switch}) {
        num::Rng a(4, 0), b(4, 0);
        SynthParams p;
        p.noise_std = 0.2;
        EXPECT_EQ(synth_series(kind, p, 40, a).values, synth_series(kind, p, 40, b).values);
    }
    EXPECT_THROW(synth_kind_from_string("sawtooth"), std::invalid_argument);
    EXPECT_EQ(synth_kind_from_string(to_string(SynthKind::trend_seasonal)), SynthKind::trend_seasonal);
}

TEST(Synth, RegimeSwitchVisitsLevels) {
    num::Rng rng(5, 0);
    SynthParams p;
    p.regime_levels = {0.0, 10.0};
    p.switch_prob = 0.2;
    const auto s = synth_series(SynthKind::regime_switch, p, 200, rng);
    int low = 0, high = 0;
    for (double v : s.values) {
        ASSERT_TRUE(v == 0.0 || v == 10.0);
        (v == 0.0 ? low : high)++;
    }
    EXPECT_GT(low, 20);
    EXPECT_GT(high, 20);
}

TEST(Synth, PresetsAreNormalizable) {
    EXPECT_EQ(synth_presets().size(), 5u);
    for (const auto& p : synth_presets()) {
        const auto dims = generate_preset(p.name, 2, 120, 7);
        ASSERT_EQ(dims.size(), 2u);
        EXPECT_NE(dims[0].values, dims[1].values);
        for (const auto& s : dims) EXPECT_NO_THROW(normalize(s, 64));
        EXPECT_EQ(generate_preset(p.name, 2, 120, 7)[0].values, dims[0].values);
    }
    EXPECT_THROW(synth_preset("synth-z"), std::invalid_argument);
}
