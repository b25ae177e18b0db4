#include <cmath>
#include <limits>
#include <stdexcept>

#include "forl/eval/eval.hpp"

namespace forl::eval {

namespace {

double step_error(const agent::StepRecord& st) {
    double sq = 0.0;
    for (std::size_t d = 0; d < 4; ++d) sq += (st.s[d] - st.est[d]) * (st.s[d] - st.est[d]);
    return std::sqrt(sq);
}

/// Continued fraction for I_x(a, b), modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace

std::vector<double> step_errors(const std::vector<agent::EpisodeLog>& logs) {
    std::vector<double> out;
    for (const auto& ep : logs) {
        for (const auto& st : ep.steps) out.push_back(step_error(st));
    }
    return out;
}

ErrorStats l2_error_stats(const std::vector<agent::EpisodeLog>& logs) {
    const auto errs = step_errors(logs);
    if (errs.empty()) throw std::invalid_argument("l2_error_stats: no steps in the logs");
    ErrorStats s;
    s.steps = errs.size();
    s.min = errs.front();
    s.max = errs.front();
    double sum = 0.0;
    for (double e : errs) {
        sum += e;
        s.min = std::min(s.min, e);
        s.max = std::max(s.max, e);
    }
    s.mean = sum / static_cast<double>(errs.size());
    double ss = 0.0;
    for (double e : errs) ss += (e - s.mean) * (e - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(errs.size()));
    return s;
}

std::vector<double> episode_errors(const std::vector<agent::EpisodeLog>& logs) {
    std::vector<double> out;
    out.reserve(logs.size());
    for (const auto& ep : logs) {
        if (ep.steps.empty()) throw std::invalid_argument("episode_errors: episode without steps");
        double sum = 0.0;
        for (const auto& st : ep.steps) sum += step_error(st);
        out.push_back(sum / static_cast<double>(ep.steps.size()));
    }
    return out;
}

std::vector<double> episode_scores(const std::vector<agent::EpisodeLog>& logs) {
    std::vector<double> out;
    out.reserve(logs.size());
    for (const auto& ep : logs) out.push_back(ep.score());
    return out;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("student t: dof must be positive");
    if (std::isnan(t)) throw std::invalid_argument("student t: t is NaN");
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

std::pair<double, double> mean_std(std::span<const double> v) {
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t_test: each sample needs at least 2 values");
    const auto [ma, sa] = mean_std(a);
    const auto [mb, sb] = mean_std(b);
    const double va = sa * sa / static_cast<double>(a.size());
    const double vb = sb * sb / static_cast<double>(b.size());
    const double se2 = va + vb;
    if (!(se2 > 0.0)) throw std::invalid_argument("welch_t_test: both samples have zero variance");
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 /
            (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    r.p = student_t_two_sided_p(r.t, r.dof);
    return r;
}

std::vector<Comparison> compare_to_baseline(const std::vector<ModeSamples>& modes, const std::string& baseline) {
    const ModeSamples* base = nullptr;
    for (const auto& m : modes) {
        if (m.mode == baseline) base = &m;
    }
    if (base == nullptr) throw std::invalid_argument("compare_to_baseline: baseline mode '" + baseline + "' was not run");
    std::vector<Comparison> out;
    for (const auto& m : modes) {
        if (m.mode == baseline) continue;
        for (const char* metric : {"score", "error"}) {
            const bool score = std::string(metric) == "score";
            const auto& xa = score ? m.scores : m.errors;
            const auto& xb = score ? base->scores : base->errors;
            Comparison c;
            c.mode = m.mode;
            c.baseline = baseline;
            c.metric = metric;
            c.n = xa.size();
            c.n_baseline = xb.size();
            c.mean = mean_std(xa).first;
            c.baseline_mean = mean_std(xb).first;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            c.test = {nan, nan, nan};
            try {
                c.test = welch_t_test(xa, xb);
            } catch (const std::invalid_argument&) {
            }
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace forl::eval
