#include "gen/forecastpfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tempo::gen {

namespace {

double seasonal_factor(const SeasonalComponent& s, double t) {
    if (s.strength == 0.0) return 1.0;
    double acc = 0.0;
    const size_t H = std::max(s.cos_coeffs.size(), s.sin_coeffs.size());
    for (size_t h = 0; h < H; ++h) {
        const double ang = 2.0 * M_PI * double(h + 1) * (t + s.offset) / s.period;
        if (h < s.cos_coeffs.size()) acc += s.cos_coeffs[h] * std::cos(ang);
        if (h < s.sin_coeffs.size()) acc += s.sin_coeffs[h] * std::sin(ang);
    }
    return 1.0 + s.strength * acc;
}

} // namespace

std::vector<double> render_forecastpfn(const ForecastPFNParams& p, size_t length,
                                       Rng& rng) {
    std::vector<double> y(length);
    // Weibull mean, subtracted so the noise factor is centered at 1
    const double wmean =
        p.weibull_scale * std::tgamma(1.0 + 1.0 / p.weibull_shape);
    for (size_t i = 0; i < length; ++i) {
        const double t = double(i);
        const double trend = (p.base + p.lin_slope * (t + p.lin_offset)) *
                             std::pow(p.exp_base, t + p.exp_offset);
        double season = 1.0;
        for (const auto& s : p.seasonal) season *= seasonal_factor(s, t);
        double noise = 0.0;
        if (p.noise_scale != 0.0)
            noise = p.noise_scale * (rng.weibull(p.weibull_shape, p.weibull_scale) - wmean);
        y[i] = trend * season * (1.0 + noise);
    }

    if (p.p_mag_scale > 0.0 && rng.bernoulli(p.p_mag_scale)) {
        const double s = rng.log_uniform(0.5, 2.0);
        for (auto& v : y) v *= s;
    }
    if (p.p_damping > 0.0 && rng.bernoulli(p.p_damping)) {
        const double rate = rng.uniform(0.5, 3.0) / double(length);
        for (size_t i = 0; i < length; ++i) y[i] *= std::exp(-rate * double(i));
    }
    if (p.p_time_warp > 0.0 && rng.bernoulli(p.p_time_warp)) {
        // smooth monotone warp: t' = t + a sin(pi t / L), |a| < L / pi
        const double a = rng.uniform(-0.25, 0.25) * double(length) / M_PI;
        std::vector<double> warped(length);
        for (size_t i = 0; i < length; ++i) {
            double tp = double(i) + a * std::sin(M_PI * double(i) / double(length));
            tp = std::clamp(tp, 0.0, double(length - 1));
            const size_t lo = size_t(std::floor(tp));
            const size_t hi = std::min(lo + 1, length - 1);
            const double frac = tp - double(lo);
            warped[i] = (1.0 - frac) * y[lo] + frac * y[hi];
        }
        y = std::move(warped);
    }
    if (p.p_spike > 0.0 && rng.bernoulli(p.p_spike)) {
        double scale = 0.0;
        for (double v : y) scale = std::max(scale, std::abs(v));
        const int n = int(rng.uniform_int(1, 3));
        for (int i = 0; i < n; ++i) {
            const size_t pos = size_t(rng.uniform_int(0, int64_t(length - 1)));
            y[pos] += (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.5, 2.0) * scale;
        }
    }
    return y;
}

ForecastPFNParams sample_forecastpfn_params(Rng& rng, size_t length) {
    ForecastPFNParams p;
    p.base = rng.uniform(0.5, 2.0);
    p.lin_slope = rng.uniform(-1.0, 1.0) / double(length);
    p.lin_offset = rng.uniform(0.0, double(length) / 8.0);
    // keep s_e^L inside [1/1000, 1000]
    const double u = rng.uniform(-std::log(1000.0), std::log(1000.0));
    p.exp_base = std::exp(u / double(length));
    p.exp_offset = rng.uniform(0.0, double(length) / 8.0);

    const int n_seasonal = int(rng.uniform_int(0, 2));
    for (int f = 0; f < n_seasonal; ++f) {
        SeasonalComponent s;
        s.strength = rng.uniform(0.05, 0.5);
        s.period = rng.log_uniform(4.0, std::max(8.0, double(length) / 2.0));
        s.offset = rng.uniform(0.0, s.period);
        const int H = int(rng.uniform_int(1, 3));
        for (int h = 0; h < H; ++h) {
            // harmonics fall off with order
            const double atten = 1.0 / double(h + 1);
            s.cos_coeffs.push_back(rng.uniform(-1.0, 1.0) * atten);
            s.sin_coeffs.push_back(rng.uniform(-1.0, 1.0) * atten);
        }
        p.seasonal.push_back(s);
    }
    p.weibull_shape = rng.uniform(1.0, 3.0);
    p.weibull_scale = 1.0;
    p.noise_scale = rng.uniform(0.0, 0.2);
    return p;
}

bool forecastpfn_filter_ok(const std::vector<double>& y) {
    double lo = y[0], hi = y[0];
    for (double v : y) {
        if (!std::isfinite(v)) return false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double absmax = std::max(std::abs(lo), std::abs(hi));
    if (absmax > 1e6) return false;
    // reject near-flat draws: spread must register against the level
    if (hi - lo < 1e-9 * std::max(1.0, absmax)) return false;
    return true;
}

TimeSeries gen_forecastpfn(Rng& rng, size_t length, const Frequency& freq,
                           int max_retries) {
    if (length < 8)
        throw std::invalid_argument("gen_forecastpfn: length must be >= 8");
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        const ForecastPFNParams p = sample_forecastpfn_params(rng, length);
        std::vector<double> y = render_forecastpfn(p, length, rng);
        if (!forecastpfn_filter_ok(y)) continue;
        TimeSeries ts = TimeSeries::with_values(std::move(y));
        ts.freq = freq;
        ts.provenance = "forecastpfn";
        return ts;
    }
    throw std::runtime_error("gen_forecastpfn: filter rejected " +
                             std::to_string(max_retries) + " consecutive draws");
}

} // namespace tempo::gen
