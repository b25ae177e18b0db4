#include "forl/numkit/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace forl::num {

std::vector<double> sinusoidal_embed(double n, std::size_t dim, double base) {
    if (dim % 2 != 0) throw std::invalid_argument("sinusoidal_embed: dim must be even");
    if (n < 0) throw std::invalid_argument("sinusoidal_embed: negative step");
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim / 2; ++i) {
        const double freq = std::pow(base, -2.0 * static_cast<double>(i) / static_cast<double>(dim));
        out[2 * i] = std::sin(n * freq);
        out[2 * i + 1] = std::cos(n * freq);
    }
    return out;
}

}  // namespace forl::num
