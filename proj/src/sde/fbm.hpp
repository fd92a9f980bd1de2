#pragma once

#include <vector>

#include "core/rng.hpp"

namespace tempo::sde {

// Exact fractional Gaussian noise on a dt grid: increments of fBm with Hurst
// exponent H, covariance
//   gamma(k) = 0.5 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) dt^{2H},
// simulated by circulant embedding (Davies-Harte). At H = 0.5 this reduces
// to i.i.d. N(0, dt). Throws when length exceeds max_length.
std::vector<double> fbm_increments(Rng& rng, size_t length, double hurst,
                                   double dt, size_t max_length = (1u << 20));

} // namespace tempo::sde
