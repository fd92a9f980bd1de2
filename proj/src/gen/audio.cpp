#include "gen/audio.hpp"

#include <algorithm>
#include <cmath>

namespace tempo::gen {

std::vector<double> biquad_bandpass(const std::vector<double>& x, double freq,
                                    double q) {
    // RBJ constant-peak-gain band-pass
    const double w0 = 2.0 * M_PI * freq;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    const double b0 = alpha / a0;
    const double b2 = -alpha / a0;
    const double a1 = -2.0 * std::cos(w0) / a0;
    const double a2 = (1.0 - alpha) / a0;

    std::vector<double> y(x.size());
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double out = b0 * x[i] + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x[i];
        y2 = y1;
        y1 = out;
        y[i] = out;
    }
    return y;
}

std::vector<double> decimate(const std::vector<double>& x, int factor) {
    std::vector<double> y(x.size() / size_t(factor));
    for (size_t i = 0; i < y.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < factor; ++k) acc += x[i * size_t(factor) + size_t(k)];
        y[i] = acc / double(factor);
    }
    return y;
}

// ------------------------------------------------------- stochastic rhythm

std::vector<double> render_stochastic_rhythm(Rng& rng, size_t length,
                                             const RhythmOptions& opt) {
    const size_t n = length * size_t(kAudioOversample);
    const double tempo_out =
        opt.tempo ? *opt.tempo
                  : rng.log_uniform(8.0, std::max(16.0, double(length) / 4.0));
    const double tempo = tempo_out * double(kAudioOversample);
    const int extra = opt.extra_layers ? *opt.extra_layers : int(rng.uniform_int(2, 4));

    std::vector<double> grid(n, 0.0);
    for (int layer = 0; layer <= extra; ++layer) {
        const bool base = layer == 0;
        const int subdivision = base ? 1 : int(rng.uniform_int(1, 4));
        const double spacing = tempo / double(subdivision);
        const double carrier = base ? 1.0 / (4.0 * spacing)
                                    : rng.log_uniform(0.5 / spacing, 4.0 / spacing);
        const double decay = spacing / 4.0;
        const double amp = base ? 1.0 : rng.uniform(0.2, 0.8);
        const double drop_p = base ? 0.0 : rng.uniform(0.0, 0.3);
        const double phase = base ? 0.0 : rng.uniform(0.0, spacing);

        double onset = phase;
        while (onset < double(n)) {
            if (drop_p == 0.0 || !rng.bernoulli(drop_p)) {
                const double hit_amp = amp * (base ? 1.0 : rng.uniform(0.7, 1.3));
                const size_t start = size_t(std::lround(onset));
                const size_t stop = std::min(n, start + size_t(6.0 * decay));
                for (size_t t = start; t < stop; ++t) {
                    const double dt = double(t) - onset;
                    grid[t] += hit_amp * std::exp(-dt / decay) *
                               std::sin(2.0 * M_PI * carrier * dt);
                }
            }
            onset += spacing;
        }
    }
    return decimate(grid, kAudioOversample);
}

// --------------------------------------------------- financial volatility

std::vector<double> render_financial_volatility(Rng& rng, size_t length,
                                                const VolatilityOptions& opt) {
    const size_t n = length * size_t(kAudioOversample);
    const double jump_rate = opt.jump_rate ? *opt.jump_rate : rng.uniform(0.5, 4.0);
    const double jump_p = jump_rate / (100.0 * double(kAudioOversample));

    const double vol_period = rng.log_uniform(double(n) / 16.0, double(n) / 2.0);
    const double vol_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double vol_depth = rng.uniform(0.5, 1.5);

    const double trend_amp = rng.uniform(0.5, 3.0);
    const double trend_period = rng.log_uniform(double(n) / 4.0, double(n) * 2.0);
    const double trend_phase = rng.uniform(0.0, 2.0 * M_PI);

    const double jump_decay = rng.log_uniform(4.0, 64.0) * double(kAudioOversample);
    const double step = 1.0 / std::sqrt(double(kAudioOversample));

    std::vector<double> grid(n);
    double brown = 0.0;
    double jump = 0.0;
    for (size_t t = 0; t < n; ++t) {
        double vol = 1.0;
        if (opt.modulation)
            vol = std::exp(vol_depth *
                           std::sin(2.0 * M_PI * double(t) / vol_period + vol_phase));
        brown += step * vol * rng.normal();

        jump *= std::exp(-1.0 / jump_decay);
        if (jump_p > 0.0 && rng.bernoulli(jump_p))
            jump += (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.log_uniform(2.0, 10.0);

        double v = brown + jump;
        if (opt.trend)
            v += trend_amp *
                 std::sin(2.0 * M_PI * double(t) / trend_period + trend_phase);
        grid[t] = v;
    }
    return decimate(grid, kAudioOversample);
}

// ------------------------------------------------------- network topology

std::vector<double> render_network_topology(Rng& rng, size_t length) {
    const size_t n = length * size_t(kAudioOversample);
    std::vector<double> grid(n, 0.0);

    // 1. slow LFO baseline
    const double lfo_amp = rng.uniform(0.5, 2.0);
    const double lfo_period = rng.log_uniform(double(n) / 8.0, double(n));
    const double lfo_phase = rng.uniform(0.0, 2.0 * M_PI);
    for (size_t t = 0; t < n; ++t)
        grid[t] += lfo_amp * std::sin(2.0 * M_PI * double(t) / lfo_period + lfo_phase);

    // 2. gated high-frequency noise bursts
    {
        const double burst_amp = rng.uniform(0.2, 0.8);
        bool open = false;
        size_t until = 0;
        for (size_t t = 0; t < n; ++t) {
            if (t >= until) {
                open = !open;
                const double mean_len = open ? double(n) / 32.0 : double(n) / 8.0;
                until = t + 1 + size_t(rng.exponential(1.0 / mean_len));
            }
            if (open) grid[t] += burst_amp * rng.normal();
        }
    }

    // 3. periodic dip envelopes
    {
        const double dip_depth = rng.uniform(0.5, 2.0);
        const double dip_period = rng.log_uniform(double(n) / 16.0, double(n) / 4.0);
        const double dip_width = dip_period * rng.uniform(0.05, 0.2);
        for (size_t t = 0; t < n; ++t) {
            const double ph = std::fmod(double(t), dip_period);
            const double d = std::min(ph, dip_period - ph);
            grid[t] -= dip_depth * std::exp(-0.5 * d * d / (dip_width * dip_width));
        }
    }

    // 4. high-frequency sine overhead
    {
        const double hf_amp = rng.uniform(0.05, 0.3);
        const double hf_freq = rng.uniform(0.1, 0.4); // cycles per grid sample
        const double hf_phase = rng.uniform(0.0, 2.0 * M_PI);
        for (size_t t = 0; t < n; ++t)
            grid[t] += hf_amp * std::sin(2.0 * M_PI * hf_freq * double(t) + hf_phase);
    }

    // 5. sparse large spikes
    {
        const int n_spikes = int(rng.uniform_int(1, 5));
        const double spike_amp = rng.uniform(3.0, 8.0);
        for (int i = 0; i < n_spikes; ++i) {
            const size_t pos = size_t(rng.uniform_int(0, int64_t(n - 1)));
            const size_t w = size_t(kAudioOversample);
            for (size_t t = pos; t < std::min(n, pos + w); ++t)
                grid[t] += (rng.bernoulli(0.7) ? 1.0 : -1.0) * spike_amp;
        }
    }
    return decimate(grid, kAudioOversample);
}

// ---------------------------------------------------- multi-scale fractal

std::vector<double> fractal_band_centers(int n_bands) {
    // log-spaced in cycles per output sample
    const double lo = 0.02, hi = 0.35;
    std::vector<double> centers(size_t(n_bands), 0.0);
    for (int i = 0; i < n_bands; ++i) {
        const double f = n_bands == 1
                             ? std::sqrt(lo * hi)
                             : lo * std::pow(hi / lo, double(i) / double(n_bands - 1));
        centers[size_t(i)] = f;
    }
    return centers;
}

std::vector<double> render_multiscale_fractal(Rng& rng, size_t length,
                                              const FractalOptions& opt) {
    const size_t n = length * size_t(kAudioOversample);
    const int n_bands = opt.n_bands ? *opt.n_bands : int(rng.uniform_int(3, 6));

    std::vector<double> brown(n);
    double acc = 0.0;
    for (size_t t = 0; t < n; ++t) {
        acc += rng.normal();
        acc *= 0.999; // leak to keep the excitation bounded
        brown[t] = acc;
    }

    const auto centers = fractal_band_centers(n_bands);
    const double atten = 0.5;
    std::vector<double> grid(n, 0.0);
    for (int b = 0; b < n_bands; ++b) {
        const double f_grid = centers[size_t(b)] / double(kAudioOversample);
        const auto band = biquad_bandpass(brown, f_grid, 2.0);
        const double gain = std::pow(atten, double(b));
        for (size_t t = 0; t < n; ++t) grid[t] += gain * band[t];
    }
    return decimate(grid, kAudioOversample);
}

} // namespace tempo::gen
