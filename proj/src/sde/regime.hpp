#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"

namespace tempo::sde {

// Two-state Markov chain with stay probabilities p00, p11; r_0 uniform.
std::vector<uint8_t> simulate_regime_chain(Rng& rng, size_t length, double p00,
                                           double p11);

} // namespace tempo::sde
