#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forl/numkit/matrix.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::forecast {

enum class Method { seasonal_naive_bootstrap, ar_bootstrap };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct ForecastRequest {
    std::vector<std::vector<double>> context;  // one history per offset dimension
    std::size_t horizon = 10;
    std::size_t samples = 50;

    void validate() const;
};

/// per_dim[d] is an (samples x horizon) matrix; row i is sample path i.
struct ForecastSamples {
    std::vector<num::Matrix> per_dim;

    std::size_t dims() const { return per_dim.size(); }
    std::size_t samples() const { return per_dim.empty() ? 0 : per_dim.front().rows(); }
    std::size_t horizon() const { return per_dim.empty() ? 0 : per_dim.front().cols(); }
    /// Sample values of dim d at horizon step h (length samples()).
    std::vector<double> column(std::size_t d, std::size_t h) const;
};

inline constexpr std::size_t kArLags = 4;
inline constexpr double kDegenerateNoiseStd = 1e-3;

/// Season with the largest context autocorrelation over lags [2, C/2];
/// ties go to the shorter lag. Returns 0 for a constant context.
std::size_t detect_season(const std::vector<double>& context);

/// OLS fit x_t = c + sum_i phi_i x_{t-i}; coefficients returned as
/// {c, phi_1, ..., phi_p}. Rank-deficient designs get the minimum-norm solution.
std::vector<double> fit_ar(const std::vector<double>& context, std::size_t lags);

/// Sample paths for one dimension. Path i draws from stream i of a generator
/// seeded with `stream_seed`, so the first paths do not depend on `samples`.
num::Matrix forecast_series(Method method, const std::vector<double>& context, std::size_t horizon,
                            std::size_t samples, std::uint64_t stream_seed);

/// Forecasts every dimension independently; dimension d uses a stream seed
/// derived from one draw of `rng` and d.
ForecastSamples forecast(Method method, const ForecastRequest& request, num::Rng& rng);

/// Column-wise mean / median over sample paths: result[d][h].
std::vector<std::vector<double>> point_mean(const ForecastSamples& samples);
std::vector<std::vector<double>> point_median(const ForecastSamples& samples);

double median(std::vector<double> values);

/// Externally produced forecast samples keyed by absolute episode index.
/// CSV columns: episode, dim, sample, value (header required).
class ExternalForecasts {
public:
    static ExternalForecasts load_csv(const std::string& path);

    /// Samples for episodes first .. first + horizon - 1 over `dims` dims.
    ForecastSamples block(std::size_t first_episode, std::size_t horizon, std::size_t dims) const;

private:
    // (episode, dim) -> sample index -> value
    std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, double>> cells_;
};

void write_samples_csv(const std::string& path, const ForecastSamples& samples, std::size_t first_episode);

}  // namespace forl::forecast
