#pragma once

#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"

namespace tempo::gen {

// Trend/seasonality/noise parameterization:
//   y_t = tau(t) * s(t) * (1 + n_t)
//   tau(t) = (b + s_l (t + o_l)) * s_e^(t + o_e)
//   s(t) = prod_f (1 + s_f * sum_h (c_{f,h} cos(2 pi h (t+o_f)/p_f)
//                                 + d_{f,h} sin(2 pi h (t+o_f)/p_f)))
//   n_t = noise_scale * (W_t - mean(W)), W ~ Weibull(shape, scale)
struct SeasonalComponent {
    double strength = 0.0; // s_f
    double period = 24.0;  // p_f
    double offset = 0.0;   // o_f
    std::vector<double> cos_coeffs; // c_{f,h}, h = 1..H
    std::vector<double> sin_coeffs; // d_{f,h}
};

struct ForecastPFNParams {
    double base = 1.0;       // b
    double lin_slope = 0.0;  // s_l
    double lin_offset = 0.0; // o_l
    double exp_base = 1.0;   // s_e, sampled so s_e^L stays in [1/1000, 1000]
    double exp_offset = 0.0; // o_e
    std::vector<SeasonalComponent> seasonal;
    double weibull_shape = 1.0;
    double weibull_scale = 1.0;
    double noise_scale = 0.0;

    // per-series augmentations, each applied with its probability
    double p_time_warp = 0.1;
    double p_mag_scale = 0.3;
    double p_damping = 0.1;
    double p_spike = 0.1;
};

ForecastPFNParams sample_forecastpfn_params(Rng& rng, size_t length);

// Renders the series for fixed params. Noise and augmentation draws come
// from rng; set noise_scale = 0 and all augmentation probabilities to 0 for
// a deterministic render.
std::vector<double> render_forecastpfn(const ForecastPFNParams& p, size_t length,
                                       Rng& rng);

// Samples params, renders, and applies the spread / extreme-value filter
// with resampling. Throws after max_retries failed draws.
TimeSeries gen_forecastpfn(Rng& rng, size_t length, const Frequency& freq,
                           int max_retries = 20);

// Filter predicate, exposed for tests: all values finite, |y| bounded, and
// the series not degenerate-flat relative to its level.
bool forecastpfn_filter_ok(const std::vector<double>& y);

} // namespace tempo::gen
