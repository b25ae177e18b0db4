#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "forl/numkit/matrix.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::fusion {

using num::Matrix;

inline constexpr double kBandwidthFloor = 1e-6;
inline constexpr double kStdFloor = 1e-6;
inline constexpr double kMadFloor = 1e-9;
inline constexpr double kWeightUnderflow = 1e-300;
inline constexpr double kMadEps = 3.0;
inline constexpr double kRansacEps = 2.5;
inline constexpr int kRansacIters = 100;

/// Throws std::invalid_argument unless X (k x n) and Y (l x n) are non-empty,
/// share n and hold finite values.
void check_candidates(const Matrix& x, const Matrix& y);

/// Dimension-wise closest match: z_d = y_{j*(d), d} with
/// j*(d) = argmin_j min_i |x_{i,d} - y_{j,d}|, ties to the lowest j.
std::vector<double> dcm(const Matrix& x, const Matrix& y);

/// Univariate Scott rule: sample std * m^(-1/5), floored at 1e-6.
double scott_bandwidth(std::span<const double> samples);

/// Weighted mean of Y rows, weight_j = prod_d KDE_d(y_{j,d}) where KDE_d is a
/// Gaussian KDE over column d of X. Falls back to mean(Y) on underflow.
std::vector<double> kde_fuse(const Matrix& x, const Matrix& y);

/// X row with the highest diagonal-Gaussian log-density under the
/// per-dimension mean and std of Y (std floored at 1e-6).
std::vector<double> max_likelihood_fuse(const Matrix& x, const Matrix& y);

/// X row nearest (Euclidean) to `center`; ties to the lowest index.
std::vector<double> closest_to_center(const Matrix& x, std::span<const double> center);

/// Column-wise mean and median of a matrix.
std::vector<double> column_mean(const Matrix& m);
std::vector<double> column_median(const Matrix& m);

/// Offsets c_i = o - x_i; rows whose offset lies within eps * MAD of the
/// per-dimension median in every dimension are inliers, and the state is
/// o minus the per-dimension median of inlier offsets (the plain median
/// when nothing survives).
std::vector<double> mad_offset_estimate(std::span<const double> o, const Matrix& x, double eps = kMadEps);

/// RANSAC over candidate offsets: each iteration picks one offset, counts
/// rows within eps * MAD (per dimension) of it, keeps the largest set (first
/// found on ties) and returns o minus the mean of its offsets.
std::vector<double> ransac_offset_estimate(std::span<const double> o, const Matrix& x, double eps, int iters,
                                           num::Rng& rng);

/// Single-pass running mean and M2.
struct WelfordState {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    WelfordState() = default;
    explicit WelfordState(std::size_t dim) : mean(dim, 0.0), m2(dim, 0.0) {}

    void reset();
    std::vector<double> variance() const;
};

void welford_update(WelfordState& state, std::span<const double> sample);

}  // namespace forl::fusion
