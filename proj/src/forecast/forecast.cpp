#include "forl/forecast/forecast.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace forl::forecast {

namespace {

bool is_constant(const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

num::Matrix seasonal_naive_paths(const std::vector<double>& x, std::size_t horizon, std::size_t samples,
                                 std::uint64_t stream_seed) {
    const std::size_t c = x.size();
    if (c < 4) throw std::invalid_argument("seasonal-naive-bootstrap: context too short (need >= 4 values)");
    std::size_t m = detect_season(x);
    if (m == 0) m = 1;
    std::vector<double> residuals;
    for (std::size_t t = m; t < c; ++t) residuals.push_back(x[t] - x[t - m]);
    const bool flat = std::all_of(residuals.begin(), residuals.end(), [](double r) { return r == 0.0; });
    num::Matrix out(samples, horizon);
    for (std::size_t i = 0; i < samples; ++i) {
        num::Rng rng(stream_seed, i);
        auto row = out.row(i);
        for (std::size_t h = 0; h < horizon; ++h) {
            const double base = h < m ? x[c - m + h] : row[h - m];
            const double r = flat ? 0.0 : residuals[rng.below(residuals.size())];
            row[h] = base + r;
        }
    }
    return out;
}

num::Matrix ar_paths(const std::vector<double>& x, std::size_t horizon, std::size_t samples,
                     std::uint64_t stream_seed) {
    const std::size_t p = kArLags;
    if (x.size() < 2 * p + 1) {
        throw std::invalid_argument("ar-bootstrap: context too short (need >= " + std::to_string(2 * p + 1) +
                                    " values)");
    }
    num::Matrix out(samples, horizon);
    if (is_constant(x)) {
        for (std::size_t i = 0; i < samples; ++i) {
            num::Rng rng(stream_seed, i);
            for (auto& v : out.row(i)) v = x.back() + kDegenerateNoiseStd * rng.gaussian();
        }
        return out;
    }
    const auto coef = fit_ar(x, p);
    std::vector<double> residuals;
    for (std::size_t t = p; t < x.size(); ++t) {
        double pred = coef[0];
        for (std::size_t l = 1; l <= p; ++l) pred += coef[l] * x[t - l];
        residuals.push_back(x[t] - pred);
    }
    for (std::size_t i = 0; i < samples; ++i) {
        num::Rng rng(stream_seed, i);
        std::vector<double> hist(x.end() - static_cast<std::ptrdiff_t>(p), x.end());
        auto row = out.row(i);
        for (std::size_t h = 0; h < horizon; ++h) {
            double pred = coef[0];
            for (std::size_t l = 1; l <= p; ++l) pred += coef[l] * hist[hist.size() - l];
            pred += residuals[rng.below(residuals.size())];
            if (!std::isfinite(pred)) throw std::runtime_error("ar-bootstrap: forecast diverged");
            row[h] = pred;
            hist.push_back(pred);
        }
    }
    return out;
}

}  // namespace

std::string to_string(Method m) {
    return m == Method::seasonal_naive_bootstrap ? "seasonal-naive-bootstrap" : "ar-bootstrap";
}

Method method_from_string(const std::string& s) {
    if (s == "seasonal-naive-bootstrap") return Method::seasonal_naive_bootstrap;
    if (s == "ar-bootstrap") return Method::ar_bootstrap;
    throw std::invalid_argument("unknown forecast method '" + s + "'");
}

void ForecastRequest::validate() const {
    if (context.empty()) throw std::invalid_argument("forecast: no dimensions");
    for (const auto& c : context) {
        if (c.size() < 2) throw std::invalid_argument("forecast: context length must be >= 2");
        for (double v : c) {
            if (!std::isfinite(v)) throw std::invalid_argument("forecast: non-finite context value");
        }
    }
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    if (samples < 1) throw std::invalid_argument("forecast: samples must be >= 1");
}

std::vector<double> ForecastSamples::column(std::size_t d, std::size_t h) const {
    const auto& m = per_dim.at(d);
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, h);
    return out;
}

std::size_t detect_season(const std::vector<double>& x) {
    const std::size_t c = x.size();
    if (c < 4) throw std::invalid_argument("detect_season: context too short");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(c);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom == 0.0) return 0;
    std::size_t best = 2;
    double best_r = -std::numeric_limits<double>::infinity();
    for (std::size_t lag = 2; lag <= c / 2; ++lag) {
        double num = 0.0;
        for (std::size_t t = lag; t < c; ++t) num += (x[t] - mean) * (x[t - lag] - mean);
        const double r = num / denom;
        if (r > best_r) {
            best_r = r;
            best = lag;
        }
    }
    return best;
}

std::vector<double> fit_ar(const std::vector<double>& x, std::size_t p) {
    if (x.size() < 2 * p + 1) throw std::invalid_argument("fit_ar: context too short");
    const auto rows = static_cast<Eigen::Index>(x.size() - p);
    Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = static_cast<std::size_t>(r) + p;
        a(r, 0) = 1.0;
        for (std::size_t l = 1; l <= p; ++l) a(r, static_cast<Eigen::Index>(l)) = x[t - l];
        y(r) = x[t];
    }
    const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(y);
    return std::vector<double>(sol.data(), sol.data() + sol.size());
}

num::Matrix forecast_series(Method method, const std::vector<double>& context, std::size_t horizon,
                            std::size_t samples, std::uint64_t stream_seed) {
    if (horizon < 1 || samples < 1) throw std::invalid_argument("forecast: horizon and samples must be >= 1");
    return method == Method::seasonal_naive_bootstrap ? seasonal_naive_paths(context, horizon, samples, stream_seed)
                                                      : ar_paths(context, horizon, samples, stream_seed);
}

ForecastSamples forecast(Method method, const ForecastRequest& request, num::Rng& rng) {
    request.validate();
    const std::uint64_t base = rng.next_u64();
    ForecastSamples out;
    for (std::size_t d = 0; d < request.context.size(); ++d) {
        const std::uint64_t dim_seed = num::Rng(base, d).next_u64();
        out.per_dim.push_back(forecast_series(method, request.context[d], request.horizon, request.samples, dim_seed));
    }
    return out;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty sample");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

std::vector<std::vector<double>> point_mean(const ForecastSamples& s) {
    if (s.samples() == 0) throw std::invalid_argument("point_mean: no samples");
    std::vector<std::vector<double>> out(s.dims(), std::vector<double>(s.horizon(), 0.0));
    for (std::size_t d = 0; d < s.dims(); ++d) {
        for (std::size_t h = 0; h < s.horizon(); ++h) {
            double sum = 0.0;
            for (std::size_t i = 0; i < s.samples(); ++i) sum += s.per_dim[d](i, h);
            out[d][h] = sum / static_cast<double>(s.samples());
        }
    }
    return out;
}

std::vector<std::vector<double>> point_median(const ForecastSamples& s) {
    if (s.samples() == 0) throw std::invalid_argument("point_median: no samples");
    std::vector<std::vector<double>> out(s.dims(), std::vector<double>(s.horizon(), 0.0));
    for (std::size_t d = 0; d < s.dims(); ++d) {
        for (std::size_t h = 0; h < s.horizon(); ++h) out[d][h] = median(s.column(d, h));
    }
    return out;
}

ExternalForecasts ExternalForecasts::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open forecast samples '" + path + "'");
    ExternalForecasts ext;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            if (line.rfind("episode,dim,sample,value", 0) != 0) {
                throw std::runtime_error(path + ": expected header 'episode,dim,sample,value'");
            }
            continue;
        }
        std::istringstream ls(line);
        std::string f[4];
        for (auto& cell : f) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": need 4 columns");
        }
        try {
            const auto ep = static_cast<std::size_t>(std::stoull(f[0]));
            const auto dim = static_cast<std::size_t>(std::stoull(f[1]));
            const auto sample = static_cast<std::size_t>(std::stoull(f[2]));
            const double value = std::stod(f[3]);
            if (!std::isfinite(value)) throw std::invalid_argument("non-finite");
            ext.cells_[{ep, dim}][sample] = value;
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
        }
    }
    if (ext.cells_.empty()) throw std::runtime_error(path + ": no forecast samples");
    return ext;
}

ForecastSamples ExternalForecasts::block(std::size_t first, std::size_t horizon, std::size_t dims) const {
    ForecastSamples out;
    std::size_t count = 0;
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t h = 0; h < horizon; ++h) {
            const auto it = cells_.find({first + h, d});
            if (it == cells_.end()) {
                throw std::runtime_error("external forecasts missing episode " + std::to_string(first + h) +
                                         " dim " + std::to_string(d));
            }
            if (count == 0) count = it->second.size();
            if (it->second.size() != count) throw std::runtime_error("external forecasts: ragged sample counts");
        }
    }
    for (std::size_t d = 0; d < dims; ++d) {
        num::Matrix m(count, horizon);
        for (std::size_t h = 0; h < horizon; ++h) {
            std::size_t i = 0;
            for (const auto& [idx, v] : cells_.at({first + h, d})) m(i++, h) = v;
        }
        out.per_dim.push_back(std::move(m));
    }
    return out;
}

void write_samples_csv(const std::string& path, const ForecastSamples& s, std::size_t first_episode) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "episode,dim,sample,value\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t h = 0; h < s.horizon(); ++h) {
        for (std::size_t d = 0; d < s.dims(); ++d) {
            for (std::size_t i = 0; i < s.samples(); ++i) {
                out << first_episode + h << ',' << d << ',' << i << ',' << s.per_dim[d](i, h) << '\n';
            }
        }
    }
}

}  // namespace forl::forecast
