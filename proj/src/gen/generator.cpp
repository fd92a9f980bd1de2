#include "gen/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "core/scaler.hpp"
#include "gen/audio.hpp"
#include "gen/cauker.hpp"
#include "gen/forecastpfn.hpp"
#include "gen/waveforms.hpp"
#include "gp/sample.hpp"
#include "sde/ou.hpp"

namespace tempo::gen {

std::string generator_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::ForecastPFN: return "forecastpfn";
        case GeneratorKind::KernelSynth: return "kernel_synth";
        case GeneratorKind::GP: return "gp";
        case GeneratorKind::CauKer: return "cauker";
        case GeneratorKind::Sawtooth: return "sawtooth";
        case GeneratorKind::Step: return "step";
        case GeneratorKind::Anomaly: return "anomaly";
        case GeneratorKind::Spikes: return "spikes";
        case GeneratorKind::SineWave: return "sine_wave";
        case GeneratorKind::AudioStochasticRhythm: return "audio_stochastic_rhythm";
        case GeneratorKind::AudioFinancialVolatility: return "audio_financial_volatility";
        case GeneratorKind::AudioNetworkTopology: return "audio_network_topology";
        case GeneratorKind::AudioMultiScaleFractal: return "audio_multi_scale_fractal";
        case GeneratorKind::Sde: return "sde";
    }
    throw std::invalid_argument("unknown generator kind");
}

GeneratorKind generator_from_name(const std::string& name) {
    for (GeneratorKind k : all_generator_kinds())
        if (generator_name(k) == name) return k;
    throw std::invalid_argument("unknown generator name: " + name);
}

std::vector<GeneratorKind> all_generator_kinds() {
    return {GeneratorKind::ForecastPFN,
            GeneratorKind::KernelSynth,
            GeneratorKind::GP,
            GeneratorKind::CauKer,
            GeneratorKind::Sawtooth,
            GeneratorKind::Step,
            GeneratorKind::Anomaly,
            GeneratorKind::Spikes,
            GeneratorKind::SineWave,
            GeneratorKind::AudioStochasticRhythm,
            GeneratorKind::AudioFinancialVolatility,
            GeneratorKind::AudioNetworkTopology,
            GeneratorKind::AudioMultiScaleFractal,
            GeneratorKind::Sde};
}

void standardize_median_iqr(std::vector<double>& values) {
    if (values.empty()) return;
    const Scaler s = fit_scaler(ScalerKind::Robust, values);
    for (auto& v : values) v = s.apply(v);
}

TimeSeries gen_kernel_synth(Rng& rng, size_t length, const Frequency& freq,
                            const gp::KernelBank& bank) {
    if (length < 2)
        throw std::invalid_argument("gen_kernel_synth: length must be >= 2");
    std::vector<double> times(length);
    for (size_t t = 0; t < length; ++t) times[t] = double(t);
    const auto kernel = gp::sample_composite_kernel(rng, bank, 5, double(length));
    std::vector<double> y = gp::sample_gp(kernel, times, rng);

    // zero mean, unit variance
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(length);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= double(length);
    const double sd = std::sqrt(std::max(var, 1e-20));
    for (auto& v : y) v = (v - mean) / sd;

    TimeSeries ts = TimeSeries::with_values(std::move(y));
    ts.freq = freq;
    ts.provenance = "kernel_synth";
    return ts;
}

TimeSeries gen_gp(Rng& rng, size_t length, const Frequency& freq,
                  const GpGenOptions& opt) {
    if (length < 2) throw std::invalid_argument("gen_gp: length must be >= 2");
    std::vector<double> times(length);
    for (size_t t = 0; t < length; ++t) times[t] = double(t);
    const gp::CompositeKernel kernel =
        opt.forced_kernel ? *opt.forced_kernel
                          : gp::sample_composite_kernel(rng, gp::KernelBank::uniform(),
                                                        opt.max_kernels, double(length));
    std::vector<double> y = gp::sample_gp(kernel, times, rng);

    if (opt.p_spike > 0.0 && rng.bernoulli(opt.p_spike)) {
        const double period = kernel.dominant_period();
        if (period >= 2.0) {
            double sd = 0.0;
            for (double v : y) sd += v * v;
            sd = std::sqrt(sd / double(length));
            const double mag = rng.uniform(2.0, 5.0) * std::max(sd, 1e-6);
            const int sign = rng.bernoulli(0.5) ? +1 : -1;
            const double jitter = opt.spike_jitter_frac * period;
            for (double c = 0.0; c < double(length); c += period) {
                double pos = c + (jitter > 0.0 ? rng.uniform(-jitter, jitter) : 0.0);
                const int64_t idx = int64_t(std::lround(pos));
                if (idx >= 0 && idx < int64_t(length)) y[size_t(idx)] += sign * mag;
            }
        }
    }
    TimeSeries ts = TimeSeries::with_values(std::move(y));
    ts.freq = freq;
    ts.provenance = "gp";
    return ts;
}

std::vector<TimeSeries> generate(GeneratorKind kind, Rng& rng, size_t length,
                                 const Frequency& freq) {
    std::vector<TimeSeries> out;
    auto push = [&](std::vector<double> y) {
        TimeSeries ts = TimeSeries::with_values(std::move(y));
        ts.freq = freq;
        out.push_back(std::move(ts));
    };

    switch (kind) {
        case GeneratorKind::ForecastPFN:
            out.push_back(gen_forecastpfn(rng, length, freq));
            break;
        case GeneratorKind::KernelSynth:
            out.push_back(gen_kernel_synth(rng, length, freq));
            break;
        case GeneratorKind::GP:
            out.push_back(gen_gp(rng, length, freq));
            break;
        case GeneratorKind::CauKer:
            out = gen_cauker(rng, length, freq);
            break;
        case GeneratorKind::Sawtooth:
            push(render_sawtooth(sample_sawtooth_params(rng, length), length));
            break;
        case GeneratorKind::Step: {
            auto p = sample_step_params(rng, length);
            auto y = render_step(p, rng);
            y.resize(length, y.empty() ? 0.0 : y.back());
            push(std::move(y));
            break;
        }
        case GeneratorKind::Anomaly:
            push(render_anomaly(sample_anomaly_params(rng, length), length, rng));
            break;
        case GeneratorKind::Spikes:
            push(render_spikes(sample_spikes_params(rng, length), length, rng));
            break;
        case GeneratorKind::SineWave:
            push(render_sine(sample_sine_params(rng, length), length, rng));
            break;
        case GeneratorKind::AudioStochasticRhythm:
            push(render_stochastic_rhythm(rng, length));
            break;
        case GeneratorKind::AudioFinancialVolatility:
            push(render_financial_volatility(rng, length));
            break;
        case GeneratorKind::AudioNetworkTopology:
            push(render_network_topology(rng, length));
            break;
        case GeneratorKind::AudioMultiScaleFractal:
            push(render_multiscale_fractal(rng, length));
            break;
        case GeneratorKind::Sde:
            out.push_back(sde::gen_sde(rng, length, freq));
            break;
    }

    const std::string name = generator_name(kind);
    for (auto& ts : out) {
        standardize_median_iqr(ts.values);
        if (ts.provenance.empty()) ts.provenance = name;
        if (ts.id.empty()) ts.id = name;
    }
    return out;
}

} // namespace tempo::gen
