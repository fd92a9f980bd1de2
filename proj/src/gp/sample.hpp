#pragma once

#include <vector>

#include "gp/kernels.hpp"

namespace tempo::gp {

// One zero-mean GP path via Cholesky of gram + jitter*I. On factorization
// failure the jitter escalates x10 up to 1e-2, then throws with the final
// jitter in the message.
std::vector<double> sample_gp(const CompositeKernel& kernel,
                              const std::vector<double>& times, Rng& rng,
                              double jitter_start = 1e-8);

} // namespace tempo::gp
