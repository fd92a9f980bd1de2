#include "sde/ou.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sde/fbm.hpp"

namespace tempo::sde {

double TrendSpec::evaluate(double t) const {
    switch (kind) {
        case TrendKind::Linear:
            return coeffs.empty() ? 0.0 : coeffs[0] * t;
        case TrendKind::Polynomial: {
            double acc = 0.0, p = t;
            for (double c : coeffs) {
                acc += c * p;
                p *= t;
            }
            return acc;
        }
        case TrendKind::Sinusoidal:
            return coeffs[0] * std::sin(2.0 * M_PI * t / coeffs[1] + coeffs[2]);
        case TrendKind::Logistic:
            return coeffs[0] / (1.0 + std::exp(-coeffs[1] * (t - coeffs[2])));
        case TrendKind::PiecewiseLinear: {
            // coeffs = t0, v0, t1, v1, ... sorted by knot time
            const size_t k = coeffs.size() / 2;
            if (k == 0) return 0.0;
            if (t <= coeffs[0]) return coeffs[1];
            for (size_t i = 0; i + 1 < k; ++i) {
                const double t0 = coeffs[2 * i], v0 = coeffs[2 * i + 1];
                const double t1 = coeffs[2 * i + 2], v1 = coeffs[2 * i + 3];
                if (t <= t1) return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
            return coeffs[2 * k - 1];
        }
    }
    return 0.0;
}

double SeasonalSpec::evaluate(double t) const {
    return (amplitude + amplitude_drift * t) *
           std::sin(2.0 * M_PI * t / period + phase);
}

void OUConfig::validate() const {
    for (int r = 0; r < 2; ++r) {
        if (!(regime.theta[r] > 0.0) || !(regime.sigma[r] > 0.0))
            throw std::invalid_argument("OUConfig: theta and sigma must be positive");
    }
    if (!(p00 > 0.0 && p00 < 1.0 + 1e-12 && p11 > 0.0 && p11 < 1.0 + 1e-12))
        throw std::invalid_argument("OUConfig: stay probabilities out of range");
    if (!(dt > 0.0)) throw std::invalid_argument("OUConfig: dt must be positive");
    const double theta_max = std::max(regime.theta[0], regime.theta[1]);
    if (!(dt * theta_max < 2.0))
        throw std::invalid_argument("OUConfig: dt * theta_max must stay below 2 (Euler stability)");
    if (use_fbm && !(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("OUConfig: Hurst exponent out of range");
}

OUParams evaluate_params(double t, int regime, const OUConfig& c) {
    double mu_trend = 0.0;
    for (const auto& tr : c.mu_trends) mu_trend += tr.evaluate(t);
    double mu_season = 0.0;
    for (const auto& s : c.mu_seasons) mu_season += s.evaluate(t);
    double sig_season = 0.0;
    for (const auto& s : c.sigma_seasons) sig_season += s.evaluate(t);

    OUParams p;
    p.theta = c.regime.theta[regime] * (1.0 + c.theta_trend.evaluate(t));
    p.mu = c.regime.mu[regime] + mu_trend + mu_season;
    p.sigma = c.regime.sigma[regime] *
              (1.0 + c.sigma_trend.evaluate(t) + sig_season);
    return p;
}

TimeSeries simulate_ou(const OUConfig& c, Rng& rng) {
    c.validate();
    const size_t burn_in = static_cast<size_t>(c.burn_in_frac * double(c.length));
    const size_t total = c.length + burn_in;

    const auto regimes = simulate_regime_chain(rng, total, c.p00, c.p11);

    std::vector<double> dw;
    if (c.use_fbm) {
        dw = fbm_increments(rng, total, c.hurst, c.dt);
    } else {
        dw.resize(total);
        const double sq = std::sqrt(c.dt);
        for (auto& v : dw) v = sq * rng.normal();
    }

    double y = rng.normal(c.regime.mu[regimes[0]], c.regime.sigma[regimes[0]]);
    std::vector<double> out;
    out.reserve(c.length);
    for (size_t i = 0; i < total; ++i) {
        const double t = double(i) * c.dt;
        const OUParams p = evaluate_params(t, regimes[i], c);
        y += p.theta * (p.mu - y) * c.dt + p.sigma * dw[i];
        if (!std::isfinite(y))
            throw std::runtime_error("simulate_ou: non-finite state at step " +
                                     std::to_string(i));
        if (i >= burn_in) out.push_back(y);
    }
    TimeSeries ts = TimeSeries::with_values(std::move(out));
    ts.provenance = "sde_ou";
    return ts;
}

TimeSeries postprocess(const TimeSeries& series, const OUConfig& c, Rng& rng) {
    TimeSeries out = series;
    for (size_t i = 0; i < out.values.size(); ++i) {
        double v = c.scale * out.values[i] + c.shift;
        if (c.noise_sigma > 0.0) v += rng.normal(0.0, c.noise_sigma);
        out.values[i] = v;
    }
    return out;
}

namespace {

TrendSpec sample_trend(Rng& rng, double horizon, double amp) {
    TrendSpec t;
    switch (rng.uniform_int(0, 4)) {
        case 0:
            t.kind = TrendKind::Linear;
            t.coeffs = {rng.uniform(-amp, amp) / horizon};
            break;
        case 1:
            t.kind = TrendKind::Polynomial;
            t.coeffs = {rng.uniform(-amp, amp) / horizon,
                        rng.uniform(-amp, amp) / (horizon * horizon),
                        rng.uniform(-amp, amp) / (horizon * horizon * horizon)};
            break;
        case 2:
            t.kind = TrendKind::Sinusoidal;
            t.coeffs = {rng.uniform(-amp, amp), rng.log_uniform(horizon / 16.0, horizon),
                        rng.uniform(0.0, 2.0 * M_PI)};
            break;
        case 3:
            t.kind = TrendKind::Logistic;
            t.coeffs = {rng.uniform(-amp, amp), rng.uniform(2.0, 20.0) / horizon,
                        rng.uniform(0.2, 0.8) * horizon};
            break;
        default: {
            t.kind = TrendKind::PiecewiseLinear;
            const int k = int(rng.uniform_int(2, 4));
            std::vector<double> knots(static_cast<size_t>(k), 0.0);
            for (auto& kt : knots) kt = rng.uniform(0.0, horizon);
            std::sort(knots.begin(), knots.end());
            t.coeffs.clear();
            for (int i = 0; i < k; ++i) {
                t.coeffs.push_back(knots[size_t(i)]);
                t.coeffs.push_back(rng.uniform(-amp, amp));
            }
            break;
        }
    }
    return t;
}

bool trend_positivity_holds(const OUConfig& c, double horizon) {
    // sampled check of 1 + delta_theta > 0 and 1 + sigma_trend + sigma_season > 0
    const int probes = 256;
    for (int i = 0; i <= probes; ++i) {
        const double t = horizon * double(i) / double(probes);
        double sig_season = 0.0;
        for (const auto& s : c.sigma_seasons) sig_season += s.evaluate(t);
        if (1.0 + c.theta_trend.evaluate(t) <= 1e-3) return false;
        if (1.0 + c.sigma_trend.evaluate(t) + sig_season <= 1e-3) return false;
    }
    return true;
}

} // namespace

OUConfig sample_ou_config(Rng& rng, size_t length) {
    OUConfig c;
    c.length = length;
    c.dt = rng.log_uniform(1e-3, 1e-1);
    const double horizon = double(length) * c.dt;

    for (int r = 0; r < 2; ++r) {
        c.regime.theta[r] = rng.log_uniform(0.1, 5.0);
        c.regime.mu[r] = rng.uniform(-5.0, 5.0);
        c.regime.sigma[r] = rng.log_uniform(0.05, 2.0);
    }
    // Euler stability: dt * theta < 2 with margin
    const double theta_max = std::max(c.regime.theta[0], c.regime.theta[1]);
    if (c.dt * theta_max >= 1.0) c.dt = 0.5 / theta_max;

    c.p00 = rng.uniform(0.85, 0.999);
    c.p11 = rng.uniform(0.85, 0.999);
    c.use_fbm = rng.bernoulli(0.3);
    c.hurst = rng.uniform(0.3, 0.8);
    c.scale = rng.uniform(0.1, 50.0);
    c.shift = rng.uniform(-100.0, 100.0);
    c.noise_sigma = rng.uniform(0.0, 0.1);

    for (int attempt = 0; attempt < 50; ++attempt) {
        c.theta_trend = sample_trend(rng, horizon, 0.5);
        c.sigma_trend = sample_trend(rng, horizon, 0.4);
        c.mu_trends = {sample_trend(rng, horizon, 2.0)};
        c.mu_seasons.clear();
        c.sigma_seasons.clear();
        const int n_seasons = int(rng.uniform_int(0, 2));
        for (int i = 0; i < n_seasons; ++i) {
            SeasonalSpec s;
            s.amplitude = rng.uniform(0.1, 2.0);
            s.period = rng.log_uniform(horizon / 32.0, horizon / 2.0);
            s.phase = rng.uniform(0.0, 2.0 * M_PI);
            s.amplitude_drift = rng.uniform(-0.5, 0.5) * s.amplitude / horizon;
            c.mu_seasons.push_back(s);
        }
        if (rng.bernoulli(0.5)) {
            SeasonalSpec s;
            s.amplitude = rng.uniform(0.05, 0.3);
            s.period = rng.log_uniform(horizon / 32.0, horizon / 2.0);
            s.phase = rng.uniform(0.0, 2.0 * M_PI);
            s.amplitude_drift = 0.0;
            c.sigma_seasons.push_back(s);
        }
        if (trend_positivity_holds(c, horizon)) return c;
    }
    // fall back to trend-free dynamics
    c.theta_trend = TrendSpec{};
    c.sigma_trend = TrendSpec{};
    c.mu_trends.clear();
    c.sigma_seasons.clear();
    return c;
}

TimeSeries gen_sde(Rng& rng, size_t length, const Frequency& freq) {
    const OUConfig c = sample_ou_config(rng, length);
    TimeSeries ts = postprocess(simulate_ou(c, rng), c, rng);
    ts.freq = freq;
    return ts;
}

} // namespace tempo::sde
