#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace tempo {

// Deterministic random source used everywhere in the project. All
// distributions are implemented on top of the raw 64-bit stream so that
// outputs are identical across platforms, standard libraries, and worker
// counts. Engine: xoshiro256**, seeded through splitmix64.
class Rng {
public:
    explicit Rng(uint64_t seed) { reseed(seed); }

    void reseed(uint64_t seed);

    uint64_t next_u64();

    // uniform in [0, 1)
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi);

    // integer uniform in [lo, hi] inclusive
    int64_t uniform_int(int64_t lo, int64_t hi);

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via Box-Muller (cosine branch only)
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential(double rate);
    double weibull(double shape, double scale);
    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1
    double gamma(double shape, double scale = 1.0);
    std::vector<double> dirichlet(const std::vector<double>& alpha);

    // weighted index draw; weights nonnegative, not all zero
    size_t weighted_index(const std::vector<double>& weights);

private:
    uint64_t s_[4];
};

// Stable seed derivation: (master, stream, index) -> child seed. Used to make
// per-series generation independent of worker scheduling.
uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index);

// One-dimensional Sobol sequence (gray-code radical inverse, base 2).
// Returns points in [0, 1).
class Sobol1D {
public:
    explicit Sobol1D(uint32_t skip = 0);
    double next();

private:
    uint32_t index_ = 0;
    uint32_t x_ = 0;
};

} // namespace tempo
