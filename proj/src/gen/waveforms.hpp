#pragma once

#include <cstdint>
#include <vector>

#include "core/rng.hpp"

namespace tempo::gen {

// --- Sawtooth ---

struct SawtoothParams {
    double amplitude = 1.0;
    double period = 16.0; // >= 2
    double phase = 0.0;   // in periods
    bool upward = true;
    double trend_slope = 0.0;
    double season_amplitude = 0.0;
    double season_period = 32.0;
};

std::vector<double> render_sawtooth(const SawtoothParams& p, size_t length);
SawtoothParams sample_sawtooth_params(Rng& rng, size_t length);

// --- Step function ---

enum class StepPattern { Stable, GradualTrend, Spike, Oscillation, RandomWalk };

struct StepSegment {
    StepPattern pattern = StepPattern::Stable;
    size_t length = 16;
    double level = 0.0;
    double param = 0.0; // trend slope / spike height / oscillation amp / walk step
};

struct StepParams {
    std::vector<StepSegment> segments;
    double smooth_sigma = 0.0; // Gaussian smoothing at boundaries when > 0
    double noise_sigma = 0.0;
    double season_amplitude = 0.0;
    double season_period = 64.0;
    double trend_slope = 0.0;
    double anomaly_prob = 0.0;
    double anomaly_magnitude = 0.0;
};

std::vector<double> render_step(const StepParams& p, Rng& rng);
StepParams sample_step_params(Rng& rng, size_t length);

// --- Anomaly ---

enum class AnomalyMagnitudeRegime { Constant, Trending, Cyclical, CorrelatedRandom };
enum class AnomalyTiming { Single, Clustered, Mixed };

struct AnomalyParams {
    double baseline = 0.0;
    int sign = +1; // all spikes share this sign
    double magnitude = 1.0;
    AnomalyMagnitudeRegime regime = AnomalyMagnitudeRegime::Constant;
    AnomalyTiming timing = AnomalyTiming::Single;
    double period = 32.0;
    double period_jitter = 0.0; // in samples
    size_t n_spikes = 8;        // 0 = constant baseline
    size_t cluster_size = 3;
};

std::vector<double> render_anomaly(const AnomalyParams& p, size_t length, Rng& rng);
AnomalyParams sample_anomaly_params(Rng& rng, size_t length);

// --- Spikes ---

enum class SpikeShape { V, InvertedV, Plateau };
enum class SpikeMode { Burst, Spread };
enum class SpikeNoise { None, Brown, Pink };

struct SpikesParams {
    double baseline = 0.0;
    size_t n_spikes = 4;
    double magnitude = 1.0;
    int sign = +1;
    SpikeShape shape = SpikeShape::V;
    size_t width = 5;         // total support of a V flank pair
    size_t plateau_width = 3; // flat top width for Plateau
    SpikeMode mode = SpikeMode::Spread;
    size_t edge_margin = 8;
    SpikeNoise noise = SpikeNoise::None;
    double noise_amplitude = 0.0;
};

std::vector<double> render_spikes(const SpikesParams& p, size_t length, Rng& rng);
SpikesParams sample_spikes_params(Rng& rng, size_t length);
// spike center positions for a spread-mode layout (exposed for tests)
std::vector<size_t> spread_spike_centers(const SpikesParams& p, size_t length);

// --- Sine wave ---

struct SineComponent {
    double amplitude = 1.0;
    double period = 32.0;
    double phase = 0.0;
    double am_depth = 0.0; // amplitude modulation
    double am_period = 256.0;
    double fm_depth = 0.0; // frequency modulation
    double fm_period = 256.0;
};

struct SineParams {
    std::vector<SineComponent> components;
    double trend_slope = 0.0;
    double trend_offset = 0.0;
    double noise_sigma = 0.0;
};

std::vector<double> render_sine(const SineParams& p, size_t length, Rng& rng);
SineParams sample_sine_params(Rng& rng, size_t length);

} // namespace tempo::gen
