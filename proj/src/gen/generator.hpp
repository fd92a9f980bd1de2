#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"
#include "gp/kernels.hpp"

namespace tempo::gen {

enum class GeneratorKind {
    ForecastPFN,
    KernelSynth,
    GP,
    CauKer,
    Sawtooth,
    Step,
    Anomaly,
    Spikes,
    SineWave,
    AudioStochasticRhythm,
    AudioFinancialVolatility,
    AudioNetworkTopology,
    AudioMultiScaleFractal,
    Sde,
};

std::string generator_name(GeneratorKind kind);
GeneratorKind generator_from_name(const std::string& name);
std::vector<GeneratorKind> all_generator_kinds();

// Shift to zero median, scale to unit IQR (epsilon-guarded). Applied to
// every corpus-level generator output before augmentation.
void standardize_median_iqr(std::vector<double>& values);

// Corpus-level entry point: samples generator parameters, renders, and
// standardizes. CauKer yields 21 channels per draw; all other kinds one.
std::vector<TimeSeries> generate(GeneratorKind kind, Rng& rng, size_t length,
                                 const Frequency& freq);

// --- KernelSynth / GP ---

TimeSeries gen_kernel_synth(Rng& rng, size_t length, const Frequency& freq,
                            const gp::KernelBank& bank = gp::KernelBank::kernel_synth());

struct GpGenOptions {
    double p_spike = 0.3;
    int max_kernels = 6;
    double spike_jitter_frac = 0.02; // jitter as fraction of the period
    // test hook: use this kernel instead of sampling one
    std::optional<gp::CompositeKernel> forced_kernel;
};

TimeSeries gen_gp(Rng& rng, size_t length, const Frequency& freq,
                  const GpGenOptions& opt = {});

} // namespace tempo::gen
