#pragma once

#include <array>
#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"
#include "sde/regime.hpp"

namespace tempo::sde {

// Per-regime OU parameters; theta and sigma strictly positive in both regimes.
struct RegimeParams {
    std::array<double, 2> theta{1.0, 1.0};
    std::array<double, 2> mu{0.0, 0.0};
    std::array<double, 2> sigma{1.0, 1.0};
};

enum class TrendKind { Linear, Polynomial, Sinusoidal, Logistic, PiecewiseLinear };

// Smooth trend function on [0, T].
//   Linear:          c0 * t
//   Polynomial:      c0 t + c1 t^2 + c2 t^3 (degree <= 3)
//   Sinusoidal:      c0 * sin(2 pi t / c1 + c2)
//   Logistic:        c0 / (1 + exp(-c1 (t - c2)))
//   PiecewiseLinear: knots (t_i, v_i) interleaved in coeffs, linear interp
struct TrendSpec {
    TrendKind kind = TrendKind::Linear;
    std::vector<double> coeffs{0.0};

    double evaluate(double t) const;
};

// Additive sinusoidal seasonal component with linear amplitude drift.
struct SeasonalSpec {
    double amplitude = 0.0;
    double period = 1.0;
    double phase = 0.0;
    double amplitude_drift = 0.0;

    double evaluate(double t) const;
};

// Full parameterization of the regime-switching, time-inhomogeneous OU
// process with optional fractional Brownian driving noise.
struct OUConfig {
    RegimeParams regime;
    TrendSpec theta_trend;                   // delta_theta(t)
    std::vector<TrendSpec> mu_trends;        // mu_trend(t), summed
    TrendSpec sigma_trend;                   // sigma_trend(t)
    std::vector<SeasonalSpec> mu_seasons;    // mu_season(t), summed
    std::vector<SeasonalSpec> sigma_seasons; // sigma_season(t), summed

    double p00 = 0.95;
    double p11 = 0.95;
    bool use_fbm = false;
    double hurst = 0.5;      // in [0.3, 0.8]
    double dt = 0.01;
    size_t length = 1024;
    double burn_in_frac = 0.1;

    double scale = 1.0;       // s in U[0.1, 50.0]
    double shift = 0.0;       // l in U[-100, 100]
    double noise_sigma = 0.0; // sigma_eps in [0, 0.1]

    void validate() const;
};

struct OUParams {
    double theta;
    double mu;
    double sigma;
};

//   theta(t, r) = theta^(r) * (1 + delta_theta(t))
//   mu(t, r)    = mu^(r) + mu_trend(t) + mu_season(t)
//   sigma(t, r) = sigma^(r) * (1 + sigma_trend(t) + sigma_season(t))
OUParams evaluate_params(double t, int regime, const OUConfig& config);

// Euler-Maruyama path, X_0 ~ N(mu^(r0), sigma^(r0)^2); the first
// burn_in_frac * length steps are discarded. No post-processing applied.
TimeSeries simulate_ou(const OUConfig& config, Rng& rng);

// output = scale * y + shift + N(0, noise_sigma^2)
TimeSeries postprocess(const TimeSeries& series, const OUConfig& config, Rng& rng);

// Samples a full OUConfig within the documented ranges; trend coefficients
// are rejection-sampled until the positivity invariants hold on [0, T].
OUConfig sample_ou_config(Rng& rng, size_t length);

// Convenience generator entry point: sample config, simulate, post-process.
TimeSeries gen_sde(Rng& rng, size_t length, const Frequency& freq);

} // namespace tempo::sde
