#pragma once

#include <cstddef>
#include <vector>

namespace forl::num {

/// Transformer-style step embedding, interleaved:
///   out[2i]   = sin(n * base^(-2i/dim))
///   out[2i+1] = cos(n * base^(-2i/dim))
/// dim must be even.
std::vector<double> sinusoidal_embed(double n, std::size_t dim, double base = 10000.0);

}  // namespace forl::num
