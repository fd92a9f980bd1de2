#pragma once

#include <optional>
#include <vector>

#include "core/rng.hpp"

namespace tempo::gen {

// All audio processes synthesize on an oversampled grid (factor 8) and
// decimate by block averaging. The option structs expose the knobs the
// tests pin down; unset fields are sampled.

inline constexpr int kAudioOversample = 8;

// Band-pass biquad (constant peak gain). freq is in cycles per sample of
// the grid it runs on, 0 < freq < 0.5.
std::vector<double> biquad_bandpass(const std::vector<double>& x, double freq,
                                    double q);

// Decimate by averaging consecutive blocks of `factor` samples.
std::vector<double> decimate(const std::vector<double>& x, int factor);

struct RhythmOptions {
    std::optional<double> tempo;    // onset spacing in output samples
    std::optional<int> extra_layers; // layers beyond the base one
};
std::vector<double> render_stochastic_rhythm(Rng& rng, size_t length,
                                             const RhythmOptions& opt = {});

struct VolatilityOptions {
    std::optional<double> jump_rate; // expected jumps per 100 output samples
    bool modulation = true;          // amplitude modulation of the noise
    bool trend = true;               // slow LFO trend
};
std::vector<double> render_financial_volatility(Rng& rng, size_t length,
                                                const VolatilityOptions& opt = {});

std::vector<double> render_network_topology(Rng& rng, size_t length);

struct FractalOptions {
    std::optional<int> n_bands; // default sampled in [3, 6]
};
std::vector<double> render_multiscale_fractal(Rng& rng, size_t length,
                                              const FractalOptions& opt = {});
// Band centers in cycles per output sample for a given band count
// (log-spaced, exposed for the spectrum test).
std::vector<double> fractal_band_centers(int n_bands);

} // namespace tempo::gen
