#include "forl/fusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "forl/forecast/forecast.hpp"

namespace forl::fusion {

namespace {

std::vector<double> column(const Matrix& m, std::size_t d) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, d);
    return out;
}

double sample_std(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void check_matrix(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument(std::string(what) + ": empty candidate set");
    if (!m.all_finite()) throw std::invalid_argument(std::string(what) + ": non-finite candidate");
}

}  // namespace

void check_candidates(const Matrix& x, const Matrix& y) {
    check_matrix(x, "diffusion candidates");
    check_matrix(y, "forecast candidates");
    if (x.cols() != y.cols()) throw std::invalid_argument("candidate sets differ in dimension");
}

std::vector<double> dcm(const Matrix& x, const Matrix& y) {
    check_candidates(x, y);
    std::vector<double> z(y.cols());
    for (std::size_t d = 0; d < y.cols(); ++d) {
        std::size_t best_j = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const double yj = y(j, d);
            double score = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < x.rows(); ++i) score = std::min(score, std::abs(x(i, d) - yj));
            if (score < best) {
                best = score;
                best_j = j;
            }
        }
        z[d] = y(best_j, d);
    }
    return z;
}

double scott_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("scott_bandwidth: need at least 2 samples");
    const double h = sample_std(samples) * std::pow(static_cast<double>(samples.size()), -0.2);
    return std::max(h, kBandwidthFloor);
}

std::vector<double> kde_fuse(const Matrix& x, const Matrix& y) {
    check_candidates(x, y);
    const std::size_t n = x.cols();
    std::vector<double> h(n);
    for (std::size_t d = 0; d < n; ++d) {
        h[d] = x.rows() >= 2 ? scott_bandwidth(column(x, d)) : kBandwidthFloor;
    }
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    std::vector<double> w(y.rows(), 1.0);
    for (std::size_t j = 0; j < y.rows(); ++j) {
        for (std::size_t d = 0; d < n; ++d) {
            double dens = 0.0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                const double u = (y(j, d) - x(i, d)) / h[d];
                dens += norm * std::exp(-0.5 * u * u) / h[d];
            }
            w[j] *= dens / static_cast<double>(x.rows());
        }
    }
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total >= kWeightUnderflow)) return column_mean(y);
    std::vector<double> z(n, 0.0);
    for (std::size_t j = 0; j < y.rows(); ++j) {
        for (std::size_t d = 0; d < n; ++d) z[d] += w[j] / total * y(j, d);
    }
    return z;
}

std::vector<double> max_likelihood_fuse(const Matrix& x, const Matrix& y) {
    check_candidates(x, y);
    const std::size_t n = x.cols();
    const auto mu = column_mean(y);
    std::vector<double> sd(n);
    for (std::size_t d = 0; d < n; ++d) sd[d] = std::max(sample_std(column(y, d)), kStdFloor);
    std::size_t best_i = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double ll = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double u = (x(i, d) - mu[d]) / sd[d];
            ll += -0.5 * u * u - std::log(sd[d]);
        }
        if (ll > best) {
            best = ll;
            best_i = i;
        }
    }
    const auto r = x.row(best_i);
    return {r.begin(), r.end()};
}

std::vector<double> closest_to_center(const Matrix& x, std::span<const double> center) {
    check_matrix(x, "closest_to_center");
    if (center.size() != x.cols()) throw std::invalid_argument("closest_to_center: dimension mismatch");
    std::size_t best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < x.cols(); ++d) d2 += (x(i, d) - center[d]) * (x(i, d) - center[d]);
        if (d2 < best) {
            best = d2;
            best_i = i;
        }
    }
    const auto r = x.row(best_i);
    return {r.begin(), r.end()};
}

std::vector<double> column_mean(const Matrix& m) {
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t d = 0; d < m.cols(); ++d) out[d] += m(i, d);
    }
    for (double& v : out) v /= static_cast<double>(m.rows());
    return out;
}

std::vector<double> column_median(const Matrix& m) {
    std::vector<double> out(m.cols());
    for (std::size_t d = 0; d < m.cols(); ++d) out[d] = forecast::median(column(m, d));
    return out;
}

std::vector<double> mad_offset_estimate(std::span<const double> o, const Matrix& x, double eps) {
    check_matrix(x, "mad_offset_estimate");
    if (o.size() != x.cols()) throw std::invalid_argument("mad_offset_estimate: dimension mismatch");
    const std::size_t n = x.cols();
    // Offsets o - x_i are a reflection of the candidates, so medians and
    // deviations are taken on the candidates directly and stay exact.
    const auto med = column_median(x);
    std::vector<double> mad(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto dev = column(x, d);
        for (double& v : dev) v = std::abs(v - med[d]);
        mad[d] = std::max(forecast::median(dev), kMadFloor);
    }
    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        bool keep = true;
        for (std::size_t d = 0; d < n && keep; ++d) keep = std::abs(x(i, d) - med[d]) <= eps * mad[d];
        if (keep) inliers.push_back(i);
    }
    if (inliers.empty()) return med;
    Matrix kept(inliers.size(), n);
    for (std::size_t r = 0; r < inliers.size(); ++r) {
        for (std::size_t d = 0; d < n; ++d) kept(r, d) = x(inliers[r], d);
    }
    return column_median(kept);
}

std::vector<double> ransac_offset_estimate(std::span<const double> o, const Matrix& x, double eps, int iters,
                                           num::Rng& rng) {
    check_matrix(x, "ransac_offset_estimate");
    if (o.size() != x.cols()) throw std::invalid_argument("ransac_offset_estimate: dimension mismatch");
    if (iters < 1) throw std::invalid_argument("ransac_offset_estimate: iters must be >= 1");
    const std::size_t k = x.rows(), n = x.cols();
    Matrix c(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t d = 0; d < n; ++d) c(i, d) = o[d] - x(i, d);
    }
    const auto med = column_median(c);
    std::vector<double> thr(n);
    for (std::size_t d = 0; d < n; ++d) {
        auto dev = column(c, d);
        for (double& v : dev) v = std::abs(v - med[d]);
        thr[d] = eps * std::max(forecast::median(dev), kMadFloor);
    }
    std::vector<std::size_t> best;
    for (int it = 0; it < iters; ++it) {
        const std::size_t pick = rng.below(k);
        std::vector<std::size_t> in;
        for (std::size_t i = 0; i < k; ++i) {
            bool ok = true;
            for (std::size_t d = 0; d < n && ok; ++d) ok = std::abs(c(i, d) - c(pick, d)) <= thr[d];
            if (ok) in.push_back(i);
        }
        if (in.size() > best.size()) best = std::move(in);
    }
    std::vector<double> state(n);
    for (std::size_t d = 0; d < n; ++d) {
        double sum = 0.0;
        for (auto i : best) sum += c(i, d);
        state[d] = o[d] - sum / static_cast<double>(best.size());
    }
    return state;
}

void WelfordState::reset() {
    count = 0;
    std::fill(mean.begin(), mean.end(), 0.0);
    std::fill(m2.begin(), m2.end(), 0.0);
}

std::vector<double> WelfordState::variance() const {
    std::vector<double> v(mean.size(), 0.0);
    if (count < 2) return v;
    for (std::size_t d = 0; d < v.size(); ++d) v[d] = m2[d] / static_cast<double>(count - 1);
    return v;
}

void welford_update(WelfordState& s, std::span<const double> sample) {
    if (s.mean.empty() && s.count == 0) {
        s.mean.assign(sample.size(), 0.0);
        s.m2.assign(sample.size(), 0.0);
    }
    if (sample.size() != s.mean.size()) throw std::invalid_argument("welford_update: dimension mismatch");
    ++s.count;
    const double n = static_cast<double>(s.count);
    for (std::size_t d = 0; d < sample.size(); ++d) {
        const double delta = sample[d] - s.mean[d];
        s.mean[d] += delta / n;
        s.m2[d] += delta * (sample[d] - s.mean[d]);
    }
}

}  // namespace forl::fusion
