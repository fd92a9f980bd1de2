#include "gen/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tempo::gen {

// ---------------------------------------------------------------- sawtooth

std::vector<double> render_sawtooth(const SawtoothParams& p, size_t length) {
    if (p.period < 2.0) throw std::invalid_argument("sawtooth period must be >= 2");
    std::vector<double> y(length);
    for (size_t t = 0; t < length; ++t) {
        double frac = double(t) / p.period + p.phase;
        frac -= std::floor(frac);
        double v = p.upward ? p.amplitude * frac : p.amplitude * (1.0 - frac);
        v += p.trend_slope * double(t);
        if (p.season_amplitude != 0.0)
            v += p.season_amplitude * std::sin(2.0 * M_PI * double(t) / p.season_period);
        y[t] = v;
    }
    return y;
}

SawtoothParams sample_sawtooth_params(Rng& rng, size_t length) {
    SawtoothParams p;
    p.amplitude = rng.log_uniform(0.5, 5.0);
    p.period = rng.log_uniform(4.0, std::max(8.0, double(length) / 2.0));
    p.phase = rng.uniform();
    p.upward = rng.bernoulli(0.5);
    p.trend_slope = rng.uniform(-0.2, 0.2) * p.amplitude / double(length);
    p.season_amplitude = rng.uniform(0.0, 0.1) * p.amplitude;
    p.season_period = rng.log_uniform(8.0, std::max(16.0, double(length)));
    return p;
}

// -------------------------------------------------------------------- step

std::vector<double> render_step(const StepParams& p, Rng& rng) {
    std::vector<double> y;
    for (const auto& seg : p.segments) {
        double walk = seg.level;
        for (size_t i = 0; i < seg.length; ++i) {
            double v = seg.level;
            switch (seg.pattern) {
                case StepPattern::Stable: break;
                case StepPattern::GradualTrend: v += seg.param * double(i); break;
                case StepPattern::Spike:
                    if (i == seg.length / 2) v += seg.param;
                    break;
                case StepPattern::Oscillation:
                    v += seg.param * std::sin(2.0 * M_PI * double(i) / 8.0);
                    break;
                case StepPattern::RandomWalk:
                    walk += seg.param * rng.normal();
                    v = walk;
                    break;
            }
            y.push_back(v);
        }
    }
    if (y.empty()) return y;

    if (p.smooth_sigma > 0.0) {
        // Gaussian kernel, truncated at 3 sigma
        const int radius = std::max(1, int(std::ceil(3.0 * p.smooth_sigma)));
        std::vector<double> kernel(size_t(2 * radius + 1));
        double sum = 0.0;
        for (int k = -radius; k <= radius; ++k) {
            const double w = std::exp(-0.5 * double(k) * double(k) /
                                      (p.smooth_sigma * p.smooth_sigma));
            kernel[size_t(k + radius)] = w;
            sum += w;
        }
        for (auto& w : kernel) w /= sum;
        std::vector<double> smoothed(y.size());
        const int n = int(y.size());
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int j = std::clamp(i + k, 0, n - 1);
                acc += kernel[size_t(k + radius)] * y[size_t(j)];
            }
            smoothed[size_t(i)] = acc;
        }
        y = std::move(smoothed);
    }

    for (size_t t = 0; t < y.size(); ++t) {
        if (p.trend_slope != 0.0) y[t] += p.trend_slope * double(t);
        if (p.season_amplitude != 0.0)
            y[t] += p.season_amplitude * std::sin(2.0 * M_PI * double(t) / p.season_period);
        if (p.noise_sigma > 0.0) y[t] += rng.normal(0.0, p.noise_sigma);
        if (p.anomaly_prob > 0.0 && rng.bernoulli(p.anomaly_prob))
            y[t] += (rng.bernoulli(0.5) ? 1.0 : -1.0) * p.anomaly_magnitude;
    }
    return y;
}

StepParams sample_step_params(Rng& rng, size_t length) {
    StepParams p;
    const int n_seg = int(rng.uniform_int(2, 8));
    size_t remaining = length;
    double level = rng.uniform(-2.0, 2.0);
    for (int s = 0; s < n_seg; ++s) {
        StepSegment seg;
        const size_t min_len = 4;
        const size_t left = size_t(n_seg - s);
        const size_t max_len = remaining > min_len * left ? remaining - min_len * (left - 1)
                                                          : min_len;
        seg.length = s + 1 == n_seg
                         ? remaining
                         : size_t(rng.uniform_int(int64_t(min_len), int64_t(max_len)));
        seg.length = std::min(seg.length, remaining);
        remaining -= seg.length;
        seg.level = level;
        const double w[] = {0.4, 0.2, 0.1, 0.15, 0.15};
        switch (rng.weighted_index({w[0], w[1], w[2], w[3], w[4]})) {
            case 0: seg.pattern = StepPattern::Stable; break;
            case 1:
                seg.pattern = StepPattern::GradualTrend;
                seg.param = rng.uniform(-0.05, 0.05);
                break;
            case 2:
                seg.pattern = StepPattern::Spike;
                seg.param = rng.uniform(0.5, 3.0) * (rng.bernoulli(0.5) ? 1 : -1);
                break;
            case 3:
                seg.pattern = StepPattern::Oscillation;
                seg.param = rng.uniform(0.1, 0.6);
                break;
            default:
                seg.pattern = StepPattern::RandomWalk;
                seg.param = rng.uniform(0.02, 0.2);
                break;
        }
        p.segments.push_back(seg);
        level += rng.uniform(-1.5, 1.5);
        if (remaining == 0) break;
    }
    p.smooth_sigma = rng.bernoulli(0.5) ? rng.uniform(0.5, 2.0) : 0.0;
    p.noise_sigma = rng.bernoulli(0.7) ? rng.uniform(0.01, 0.1) : 0.0;
    p.season_amplitude = rng.bernoulli(0.3) ? rng.uniform(0.05, 0.3) : 0.0;
    p.season_period = rng.log_uniform(8.0, std::max(16.0, double(length) / 2.0));
    p.trend_slope = rng.bernoulli(0.3) ? rng.uniform(-1.0, 1.0) / double(length) : 0.0;
    p.anomaly_prob = rng.bernoulli(0.3) ? rng.uniform(0.001, 0.01) : 0.0;
    p.anomaly_magnitude = rng.uniform(1.0, 4.0);
    return p;
}

// ----------------------------------------------------------------- anomaly

std::vector<double> render_anomaly(const AnomalyParams& p, size_t length, Rng& rng) {
    std::vector<double> y(length, p.baseline);
    if (p.n_spikes == 0 || length == 0) return y;

    std::vector<size_t> positions;
    auto add_periodic = [&](size_t count, size_t start) {
        double t = double(start);
        for (size_t i = 0; i < count && t < double(length); ++i) {
            double jittered = t + (p.period_jitter > 0.0
                                       ? rng.uniform(-p.period_jitter, p.period_jitter)
                                       : 0.0);
            const int64_t idx = int64_t(std::lround(jittered));
            if (idx >= 0 && idx < int64_t(length)) positions.push_back(size_t(idx));
            t += p.period;
        }
    };
    switch (p.timing) {
        case AnomalyTiming::Single: add_periodic(p.n_spikes, size_t(p.period / 2)); break;
        case AnomalyTiming::Clustered: {
            size_t placed = 0;
            while (placed < p.n_spikes) {
                const size_t start = size_t(rng.uniform_int(0, int64_t(length - 1)));
                for (size_t j = 0; j < p.cluster_size && placed < p.n_spikes; ++j) {
                    const size_t idx = start + j;
                    if (idx < length) {
                        positions.push_back(idx);
                        ++placed;
                    } else {
                        placed = p.n_spikes;
                    }
                }
            }
            break;
        }
        case AnomalyTiming::Mixed: {
            add_periodic(p.n_spikes / 2, size_t(p.period / 2));
            const size_t rest = p.n_spikes - p.n_spikes / 2;
            for (size_t i = 0; i < rest; ++i)
                positions.push_back(size_t(rng.uniform_int(0, int64_t(length - 1))));
            break;
        }
    }

    for (size_t i = 0; i < positions.size(); ++i) {
        double mag = p.magnitude;
        switch (p.regime) {
            case AnomalyMagnitudeRegime::Constant: break;
            case AnomalyMagnitudeRegime::Trending:
                mag *= 1.0 + double(positions[i]) / double(length);
                break;
            case AnomalyMagnitudeRegime::Cyclical:
                mag *= 1.0 + 0.5 * std::sin(2.0 * M_PI * double(i) / 4.0);
                break;
            case AnomalyMagnitudeRegime::CorrelatedRandom:
                // AR(1)-style magnitude drift
                mag *= 1.0 + 0.3 * rng.normal() + 0.2 * double(i % 3);
                break;
        }
        y[positions[i]] = p.baseline + double(p.sign) * std::abs(mag);
    }
    return y;
}

AnomalyParams sample_anomaly_params(Rng& rng, size_t length) {
    AnomalyParams p;
    p.baseline = rng.uniform(-1.0, 1.0);
    p.sign = rng.bernoulli(0.5) ? +1 : -1;
    p.magnitude = rng.log_uniform(0.5, 4.0);
    p.regime = AnomalyMagnitudeRegime(rng.uniform_int(0, 3));
    p.timing = AnomalyTiming(rng.uniform_int(0, 2));
    p.period = rng.log_uniform(8.0, std::max(16.0, double(length) / 4.0));
    p.period_jitter = rng.uniform(0.0, 0.15) * p.period;
    p.n_spikes = size_t(rng.uniform_int(3, std::max<int64_t>(4, int64_t(length / 16))));
    p.cluster_size = size_t(rng.uniform_int(2, 5));
    return p;
}

// ------------------------------------------------------------------ spikes

std::vector<size_t> spread_spike_centers(const SpikesParams& p, size_t length) {
    std::vector<size_t> centers;
    if (p.n_spikes == 0) return centers;
    const size_t lo = p.edge_margin;
    const size_t hi = length > p.edge_margin ? length - p.edge_margin : length;
    if (hi <= lo) return centers;
    const double span = double(hi - lo);
    for (size_t i = 0; i < p.n_spikes; ++i) {
        // even spacing with half-gap offsets
        const double pos = double(lo) + span * (double(i) + 0.5) / double(p.n_spikes);
        centers.push_back(size_t(std::lround(pos)));
    }
    return centers;
}

std::vector<double> render_spikes(const SpikesParams& p, size_t length, Rng& rng) {
    std::vector<double> y(length, p.baseline);

    std::vector<size_t> centers;
    if (p.mode == SpikeMode::Spread) {
        centers = spread_spike_centers(p, length);
    } else {
        const size_t start = length > 4 * p.n_spikes
                                 ? size_t(rng.uniform_int(0, int64_t(length - 4 * p.n_spikes)))
                                 : 0;
        for (size_t i = 0; i < p.n_spikes; ++i) {
            const size_t c = start + i * std::max<size_t>(2, p.width + 1);
            if (c < length) centers.push_back(c);
        }
    }

    const double peak = double(p.sign) * p.magnitude;
    for (size_t c : centers) {
        if (p.shape == SpikeShape::Plateau) {
            const size_t half = p.plateau_width / 2;
            for (size_t k = 0; k < p.plateau_width; ++k) {
                const int64_t idx = int64_t(c) - int64_t(half) + int64_t(k);
                if (idx >= 0 && idx < int64_t(length)) y[size_t(idx)] = p.baseline + peak;
            }
        } else {
            const size_t half = std::max<size_t>(1, p.width / 2);
            for (int64_t k = -int64_t(half); k <= int64_t(half); ++k) {
                const int64_t idx = int64_t(c) + k;
                if (idx < 0 || idx >= int64_t(length)) continue;
                const double frac = 1.0 - double(std::abs(double(k))) / double(half + 1);
                double v = peak * frac;
                if (p.shape == SpikeShape::InvertedV) v = peak * (1.0 - frac);
                y[size_t(idx)] = p.baseline + v;
            }
        }
    }

    if (p.noise != SpikeNoise::None && p.noise_amplitude > 0.0) {
        double brown = 0.0, pink1 = 0.0, pink2 = 0.0, pink3 = 0.0;
        for (size_t t = 0; t < length; ++t) {
            double n;
            if (p.noise == SpikeNoise::Brown) {
                brown += rng.normal();
                brown *= 0.995; // leak to keep it bounded
                n = brown * 0.1;
            } else {
                // Paul Kellet style pink approximation
                const double w = rng.normal();
                pink1 = 0.997 * pink1 + 0.029591 * w;
                pink2 = 0.985 * pink2 + 0.032534 * w;
                pink3 = 0.950 * pink3 + 0.048056 * w;
                n = pink1 + pink2 + pink3;
            }
            y[t] += p.noise_amplitude * n;
        }
    }
    return y;
}

SpikesParams sample_spikes_params(Rng& rng, size_t length) {
    SpikesParams p;
    p.baseline = rng.uniform(-0.5, 0.5);
    p.n_spikes = size_t(rng.uniform_int(2, std::max<int64_t>(3, int64_t(length / 24))));
    p.magnitude = rng.log_uniform(0.5, 4.0);
    p.sign = rng.bernoulli(0.5) ? +1 : -1;
    p.shape = SpikeShape(rng.uniform_int(0, 2));
    p.width = size_t(rng.uniform_int(3, 9));
    p.plateau_width = size_t(rng.uniform_int(2, 6));
    p.mode = rng.bernoulli(0.5) ? SpikeMode::Burst : SpikeMode::Spread;
    p.edge_margin = size_t(rng.uniform_int(4, std::max<int64_t>(5, int64_t(length / 16))));
    p.noise = rng.bernoulli(0.4)
                  ? (rng.bernoulli(0.5) ? SpikeNoise::Brown : SpikeNoise::Pink)
                  : SpikeNoise::None;
    p.noise_amplitude = rng.uniform(0.02, 0.15) * p.magnitude;
    return p;
}

// -------------------------------------------------------------------- sine

std::vector<double> render_sine(const SineParams& p, size_t length, Rng& rng) {
    std::vector<double> y(length, 0.0);
    for (const auto& c : p.components) {
        double phase = c.phase;
        for (size_t t = 0; t < length; ++t) {
            const double amp =
                c.amplitude *
                (1.0 + c.am_depth * std::sin(2.0 * M_PI * double(t) / c.am_period));
            y[t] += amp * std::sin(phase);
            // instantaneous frequency modulated by a slow sinusoid,
            // accumulated by phase integration
            const double inst_freq =
                (1.0 / c.period) *
                (1.0 + c.fm_depth * std::sin(2.0 * M_PI * double(t) / c.fm_period));
            phase += 2.0 * M_PI * inst_freq;
        }
    }
    for (size_t t = 0; t < length; ++t) {
        y[t] += p.trend_slope * double(t) + p.trend_offset;
        if (p.noise_sigma > 0.0) y[t] += rng.normal(0.0, p.noise_sigma);
    }
    return y;
}

SineParams sample_sine_params(Rng& rng, size_t length) {
    SineParams p;
    const int n = int(rng.uniform_int(1, 3));
    for (int i = 0; i < n; ++i) {
        SineComponent c;
        c.amplitude = rng.log_uniform(0.3, 3.0);
        c.period = rng.log_uniform(8.0, std::max(16.0, double(length) / 2.0));
        c.phase = rng.uniform(0.0, 2.0 * M_PI);
        c.am_depth = rng.bernoulli(0.6) ? rng.uniform(0.05, 0.4) : 0.0;
        c.am_period = rng.log_uniform(double(length) / 4.0, double(length) * 2.0);
        c.fm_depth = rng.bernoulli(0.6) ? rng.uniform(0.05, 0.3) : 0.0;
        c.fm_period = rng.log_uniform(double(length) / 4.0, double(length) * 2.0);
        p.components.push_back(c);
    }
    p.trend_slope = rng.bernoulli(0.5) ? rng.uniform(-1.0, 1.0) / double(length) : 0.0;
    p.trend_offset = rng.uniform(-1.0, 1.0);
    p.noise_sigma = rng.bernoulli(0.7) ? rng.uniform(0.01, 0.2) : 0.0;
    return p;
}

} // namespace tempo::gen
