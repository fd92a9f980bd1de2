#include "core/rng.hpp"

#include <cassert>
#include <stdexcept>

namespace tempo {

namespace {

uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

void Rng::reseed(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

uint64_t Rng::next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
    assert(hi >= lo);
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(next_u64()); // full range
    // rejection sampling to avoid modulo bias
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t r;
    do {
        r = next_u64();
    } while (r >= limit);
    return lo + static_cast<int64_t>(r % span);
}

double Rng::normal() {
    double u1, u2;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::exponential(double rate) {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
}

double Rng::weibull(double shape, double scale) {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return scale * std::pow(-std::log(u), 1.0 / shape);
}

double Rng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return scale * d * v;
    }
}

std::vector<double> Rng::dirichlet(const std::vector<double>& alpha) {
    std::vector<double> out(alpha.size());
    double sum = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i]);
        sum += out[i];
    }
    if (sum <= 0.0) {
        // all gammas underflowed; fall back to uniform weights
        for (auto& v : out) v = 1.0 / static_cast<double>(out.size());
        return out;
    }
    for (auto& v : out) v /= sum;
    return out;
}

size_t Rng::weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("all weights zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t index) {
    uint64_t x = master;
    splitmix64(x);
    x ^= 0x6a09e667f3bcc909ULL + stream;
    splitmix64(x);
    x ^= 0xbb67ae8584caa73bULL + index;
    return splitmix64(x);
}

Sobol1D::Sobol1D(uint32_t skip) {
    for (uint32_t i = 0; i < skip; ++i) next();
}

double Sobol1D::next() {
    ++index_;
    // position of lowest zero bit of (index-1), gray-code update
    uint32_t c = 0;
    uint32_t value = index_ - 1;
    while (value & 1u) {
        value >>= 1;
        ++c;
    }
    x_ ^= 1u << (31 - c);
    return static_cast<double>(x_) * 0x1.0p-32;
}

} // namespace tempo
