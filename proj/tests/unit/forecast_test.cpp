#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "forl/forecast/forecast.hpp"

namespace num = forl::num;
namespace fc = forl::forecast;
using namespace forl::forecast;

TEST(Season, DetectsPeriod) {
    std::vector<double> x;
    for (int t = 0; t < 64; ++t) x.push_back(std::sin(2 * std::numbers::pi * t / 8.0));
    EXPECT_EQ(detect_season(x), 8u);
    EXPECT_EQ(detect_season(std::vector<double>(10, 3.0)), 0u);
}

TEST(SeasonalNaive, PeriodicContextRepeatsLastSeason) {
    std::vector<double> x;
    const double pattern[5] = {1, 4, 2, 8, 5};
    for (int t = 0; t < 40; ++t) x.push_back(pattern[t % 5]);
    const auto paths = forecast_series(Method::seasonal_naive_bootstrap, x, 12, 20, 99);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t h = 0; h < 12; ++h) EXPECT_EQ(paths(i, h), pattern[(40 + h) % 5]);
    }
}

TEST(SeasonalNaive, ConstantContextGivesConstantPaths) {
    const auto paths = forecast_series(Method::seasonal_naive_bootstrap, std::vector<double>(16, 0.0), 5, 7, 1);
    for (double v : paths.data()) EXPECT_EQ(v, 0.0);
}

TEST(Forecast, PathStreamsAreIsolated) {
    num::Rng gen(1, 0);
    std::vector<double> x;
    for (int t = 0; t < 64; ++t) x.push_back(std::sin(t * 0.7) + 0.3 * gen.gaussian());
    for (auto m : {Method::seasonal_naive_bootstrap, Method::ar_bootstrap}) {
        const auto one = forecast_series(m, x, 10, 1, 42);
        const auto many = forecast_series(m, x, 10, 100, 42);
        for (std::size_t h = 0; h < 10; ++h) EXPECT_EQ(one(0, h), many(0, h));
    }
}

TEST(Forecast, ShapeAndDeterminism) {
    ForecastRequest req;
    num::Rng gen(2, 0);
    req.context.resize(2);
    for (int t = 0; t < 64; ++t) {
        req.context[0].push_back(gen.gaussian());
        req.context[1].push_back(std::cos(t * 0.5));
    }
    req.horizon = 7;
    req.samples = 13;
    num::Rng a(3, 0), b(3, 0);
    const auto fa = fc::forecast(Method::seasonal_naive_bootstrap, req, a);
    const auto fb = fc::forecast(Method::seasonal_naive_bootstrap, req, b);
    ASSERT_EQ(fa.dims(), 2u);
    EXPECT_EQ(fa.samples(), 13u);
    EXPECT_EQ(fa.horizon(), 7u);
    EXPECT_EQ(fa.per_dim[0], fb.per_dim[0]);
    EXPECT_EQ(fa.per_dim[1], fb.per_dim[1]);
}

TEST(Forecast, DimensionsIndependentWithMatchedStreams) {
    std::vector<double> a, b;
    for (int t = 0; t < 64; ++t) {
        a.push_back(std::sin(t * 0.9) + 0.01 * t);
        b.push_back(std::cos(t * 0.3));
    }
    const auto fa = forecast_series(Method::ar_bootstrap, a, 5, 10, 11);
    const auto fb = forecast_series(Method::ar_bootstrap, b, 5, 10, 12);
    const auto fb2 = forecast_series(Method::ar_bootstrap, b, 5, 10, 12);
    const auto fa2 = forecast_series(Method::ar_bootstrap, a, 5, 10, 11);
    EXPECT_EQ(fa, fa2);
    EXPECT_EQ(fb, fb2);
}

TEST(ArBootstrap, RecoversNoiselessCoefficient) {
    std::vector<double> x{5.0};
    for (int t = 1; t < 64; ++t) x.push_back(0.9 * x.back());
    const auto coef = fit_ar(x, kArLags);
    double pred = coef[0];
    for (std::size_t l = 1; l <= kArLags; ++l) pred += coef[l] * x[x.size() - l];
    EXPECT_NEAR(pred, 0.9 * x.back(), 1e-6);
    const auto paths = forecast_series(Method::ar_bootstrap, x, 3, 5, 7);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(paths(i, 0), 0.9 * x.back(), 1e-6);
}

TEST(ArBootstrap, DegenerateContextFallsBack) {
    const auto paths = forecast_series(Method::ar_bootstrap, std::vector<double>(20, 2.0), 4, 200, 5);
    double sum = 0.0, sq = 0.0;
    for (double v : paths.data()) {
        sum += v - 2.0;
        sq += (v - 2.0) * (v - 2.0);
    }
    const double n = static_cast<double>(paths.size());
    EXPECT_NEAR(std::sqrt(sq / n), kDegenerateNoiseStd, 2e-4);
    EXPECT_LT(std::abs(sum / n), 1e-4);
}

TEST(Forecast, ContextTooShort) {
    EXPECT_THROW(forecast_series(Method::seasonal_naive_bootstrap, {1, 2, 3}, 2, 2, 1), std::invalid_argument);
    EXPECT_THROW(forecast_series(Method::ar_bootstrap, {1, 2, 3, 4, 5, 6}, 2, 2, 1), std::invalid_argument);
    ForecastRequest req;
    req.context = {{1.0}};
    num::Rng rng(1, 0);
    EXPECT_THROW(fc::forecast(Method::seasonal_naive_bootstrap, req, rng), std::invalid_argument);
}

TEST(PointForecast, MeanAndMedian) {
    ForecastSamples s;
    s.per_dim.push_back(num::Matrix(1, 3, std::vector<double>{1, 2, 3}));
    EXPECT_EQ(point_mean(s)[0], (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(point_median(s)[0], (std::vector<double>{1, 2, 3}));
    ForecastSamples two;
    two.per_dim.push_back(num::Matrix(2, 2, std::vector<double>{0, 0, 2, 2}));
    EXPECT_EQ(point_mean(two)[0], (std::vector<double>{1, 1}));
    EXPECT_EQ(point_median(two)[0], (std::vector<double>{1, 1}));
}

TEST(PointForecast, MeanWithinCltBound) {
    num::Rng rng(6, 0);
    const double mu = 3.0, sigma = 2.0;
    ForecastSamples s;
    num::Matrix m(10000, 4);
    for (auto& v : m.data()) v = mu + sigma * rng.gaussian();
    s.per_dim.push_back(m);
    const auto pm = point_mean(s);
    for (double v : pm[0]) EXPECT_LT(std::abs(v - mu), 3 * sigma / 100);
}

TEST(SeasonalNaive, IntervalCalibration) {
    num::Rng gen(7, 0);
    int covered = 0, cells = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> full;
        for (int t = 0; t < 74; ++t) full.push_back(std::sin(2 * std::numbers::pi * t / 12.0) + 0.3 * gen.gaussian());
        const std::vector<double> ctx(full.begin(), full.begin() + 64);
        const auto paths = forecast_series(Method::seasonal_naive_bootstrap, ctx, 10, 200, 100 + trial);
        for (std::size_t h = 0; h < 10; ++h) {
            std::vector<double> col;
            for (std::size_t i = 0; i < 200; ++i) col.push_back(paths(i, h));
            std::sort(col.begin(), col.end());
            const double lo = col[20], hi = col[179];
            const double truth = full[64 + h];
            covered += truth >= lo && truth <= hi;
            ++cells;
        }
    }
    const double rate = covered / static_cast<double>(cells);
    EXPECT_EQ(cells, 200);
    EXPECT_GE(rate, 0.65);
    EXPECT_LE(rate, 0.95);
}

TEST(ExternalForecasts, CsvRoundTrip) {
    ForecastSamples s;
    s.per_dim.push_back(num::Matrix(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6}));
    s.per_dim.push_back(num::Matrix(3, 2, std::vector<double>{-1, -2, -3, -4, -5, -6}));
    const auto path = (std::filesystem::temp_directory_path() / "forl_fc.csv").string();
    write_samples_csv(path, s, 70);
    const auto ext = ExternalForecasts::load_csv(path);
    const auto b = ext.block(70, 2, 2);
    EXPECT_EQ(b.per_dim[0], s.per_dim[0]);
    EXPECT_EQ(b.per_dim[1], s.per_dim[1]);
    EXPECT_THROW(ext.block(71, 2, 2), std::runtime_error);
    std::filesystem::remove(path);
}
