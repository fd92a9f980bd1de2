#include "sde/regime.hpp"

#include <stdexcept>

namespace tempo::sde {

std::vector<uint8_t> simulate_regime_chain(Rng& rng, size_t length, double p00,
                                           double p11) {
    if (!(p00 > 0.0 && p00 <= 1.0 && p11 > 0.0 && p11 <= 1.0))
        throw std::invalid_argument("regime stay probabilities must be in (0, 1]");
    std::vector<uint8_t> path(length);
    if (length == 0) return path;
    uint8_t r = rng.bernoulli(0.5) ? 1 : 0;
    path[0] = r;
    for (size_t i = 1; i < length; ++i) {
        const double stay = r == 0 ? p00 : p11;
        if (!rng.bernoulli(stay)) r ^= 1;
        path[i] = r;
    }
    return path;
}

} // namespace tempo::sde
