#include "aug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/calendar.hpp"
#include "core/scaler.hpp"

namespace tempo::aug {

std::string category_name(CategoryKind kind) {
    switch (kind) {
        case CategoryKind::Invariances: return "invariances";
        case CategoryKind::Structure: return "structure";
        case CategoryKind::Seasonality: return "seasonality";
        case CategoryKind::SignalProcessing: return "signal_processing";
        case CategoryKind::DiscreteEffects: return "discrete_effects";
        case CategoryKind::MeasurementArtifacts: return "measurement_artifacts";
    }
    return "?";
}

void AugmentationConfig::validate() const {
    for (double p : {normalize_prob, early_mixup_prob, late_mixup_prob,
                     conv_filter_prob, time_varying_mixup_prob})
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("AugmentationConfig: probability out of [0,1]");
    if (categories_min < 0 || categories_max > 6 || categories_min > categories_max)
        throw std::invalid_argument("AugmentationConfig: category range out of [0,6]");
}

// ------------------------------------------------------------------ mixup

TimeSeries ts_mixup_static(const std::vector<TimeSeries>& sources,
                           const std::vector<double>& weights) {
    if (sources.size() < 2 || sources.size() > 10)
        throw std::invalid_argument("ts_mixup: need 2-10 sources");
    if (weights.size() != sources.size())
        throw std::invalid_argument("ts_mixup: weight count mismatch");
    const size_t n = sources[0].size();
    for (const auto& s : sources)
        if (s.size() != n) throw std::invalid_argument("ts_mixup: length mismatch");

    TimeSeries out = sources[0];
    for (size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (size_t i = 0; i < sources.size(); ++i)
            acc += weights[i] * sources[i].values[t];
        out.values[t] = acc;
    }
    return out;
}

TimeSeries ts_mixup(const std::vector<TimeSeries>& sources, Rng& rng,
                    double dirichlet_alpha, bool time_varying) {
    if (sources.size() < 2 || sources.size() > 10)
        throw std::invalid_argument("ts_mixup: need 2-10 sources");
    const size_t n = sources[0].size();
    for (const auto& s : sources)
        if (s.size() != n) throw std::invalid_argument("ts_mixup: length mismatch");

    const std::vector<double> alpha(sources.size(), dirichlet_alpha);
    const auto w0 = rng.dirichlet(alpha);
    if (!time_varying) return ts_mixup_static(sources, w0);

    const auto w1 = rng.dirichlet(alpha);
    TimeSeries out = sources[0];
    for (size_t t = 0; t < n; ++t) {
        // smoothstep along the straight simplex path between the two draws
        const double u = n > 1 ? double(t) / double(n - 1) : 0.0;
        const double s = u * u * (3.0 - 2.0 * u);
        double acc = 0.0;
        for (size_t i = 0; i < sources.size(); ++i)
            acc += ((1.0 - s) * w0[i] + s * w1[i]) * sources[i].values[t];
        out.values[t] = acc;
    }
    return out;
}

// ------------------------------------------------------ transformations

namespace {

double series_min(const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
}
double series_max(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end());
}

// affine map of out's range onto the input's [min, max]
void restore_range(std::vector<double>& out, double in_lo, double in_hi) {
    const double lo = series_min(out), hi = series_max(out);
    if (hi - lo < 1e-12 || in_hi - in_lo < 1e-12) return;
    const double a = (in_hi - in_lo) / (hi - lo);
    for (auto& v : out) v = in_lo + a * (v - lo);
}

std::vector<double> difference(const std::vector<double>& x,
                               const std::vector<double>& stencil) {
    // centered stencil, edge replication
    const int n = int(x.size());
    const int radius = int(stencil.size()) / 2;
    std::vector<double> y(x.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < int(stencil.size()); ++k) {
            const int j = std::clamp(i + k - radius, 0, n - 1);
            acc += stencil[size_t(k)] * x[size_t(j)];
        }
        y[size_t(i)] = acc;
    }
    return y;
}

TimeSeries piecewise_affine(const TimeSeries& s, Rng& rng) {
    TimeSeries out = s;
    const size_t n = s.size();
    const int cuts = int(rng.uniform_int(1, 4));
    std::vector<size_t> bounds = {0};
    for (int i = 0; i < cuts; ++i)
        bounds.push_back(size_t(rng.uniform_int(1, int64_t(n - 1))));
    bounds.push_back(n);
    std::sort(bounds.begin(), bounds.end());
    for (size_t b = 0; b + 1 < bounds.size(); ++b) {
        const double a = rng.uniform(0.5, 1.8);
        const double c = rng.uniform(-0.5, 0.5);
        for (size_t t = bounds[b]; t < bounds[b + 1]; ++t)
            out.values[t] = a * out.values[t] + c;
    }
    return out;
}

TimeSeries exp_shock(const TimeSeries& s, Rng& rng) {
    TimeSeries out = s;
    const size_t n = s.size();
    double m = 0;
    for (double v : s.values) m += v;
    m /= double(n);
    double var = 0;
    for (double v : s.values) var += (v - m) * (v - m);
    const double sd = std::sqrt(std::max(1e-12, var / double(n)));
    const double A = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(1.0, 4.0) *
                     std::max(sd, 1e-6);
    const size_t t0 = size_t(rng.uniform_int(0, int64_t(n - 1)));
    const double tau = rng.log_uniform(2.0, std::max(4.0, double(n) / 4.0));
    for (size_t t = t0; t < n; ++t)
        out.values[t] += A * std::exp(-double(t - t0) / tau);
    return out;
}

TimeSeries calendar_effects(const TimeSeries& s, Rng& rng) {
    // undefined for frequencies coarser than daily
    if (!is_sub_daily(s.freq) && s.freq.unit != FreqUnit::Days) return s;
    TimeSeries out = s;
    const bool weekend = rng.bernoulli(0.5);
    const double weekend_factor = rng.uniform(0.3, 0.8);
    const double month_end_factor = rng.uniform(1.2, 2.0);
    for (size_t t = 0; t < s.size(); ++t) {
        const int64_t ts = advance(s.start, s.freq, int64_t(t));
        if (weekend) {
            if (day_of_week(ts) >= 5) out.values[t] *= weekend_factor;
        } else {
            const CivilTime ct = civil_from_epoch(ts);
            if (ct.day == days_in_month(ct.year, ct.month))
                out.values[t] *= month_end_factor;
        }
    }
    return out;
}

TimeSeries localized_scaling(const TimeSeries& s, Rng& rng) {
    TimeSeries out = s;
    const size_t n = s.size();
    const size_t len = size_t(rng.uniform_int(int64_t(n / 8 + 1), int64_t(n / 2 + 1)));
    const size_t start = size_t(rng.uniform_int(0, int64_t(n - 1)));
    const double factor = rng.uniform(0.3, 3.0);
    for (size_t t = start; t < std::min(n, start + len); ++t)
        out.values[t] *= factor;
    return out;
}

TimeSeries derivative_like(const TimeSeries& s, Rng& rng) {
    const double in_lo = series_min(s.values), in_hi = series_max(s.values);
    std::vector<double> y;
    switch (rng.uniform_int(0, 3)) {
        case 0: // Sobel
            y = difference(s.values, {-0.5, 0.0, 0.5});
            break;
        case 1: // Laplacian
            y = difference(s.values, {1.0, -2.0, 1.0});
            break;
        case 2: { // 3rd or 4th order by repeated differencing
            const int order = int(rng.uniform_int(3, 4));
            y = s.values;
            for (int i = 0; i < order; ++i) y = difference(y, {-1.0, 1.0, 0.0});
            break;
        }
        default: { // integration
            y.resize(s.size());
            double acc = 0.0;
            for (size_t t = 0; t < s.size(); ++t) {
                acc += s.values[t];
                y[t] = acc;
            }
            break;
        }
    }
    restore_range(y, in_lo, in_hi);
    TimeSeries out = s;
    // degenerate output (constant derivative of a constant input): keep input
    if (series_max(y) - series_min(y) >= 1e-12) out.values = std::move(y);
    return out;
}

} // namespace

TimeSeries reverse_series(const TimeSeries& s) {
    TimeSeries out = s;
    std::reverse(out.values.begin(), out.values.end());
    std::vector<bool> m(s.mask.rbegin(), s.mask.rend());
    out.mask = std::move(m);
    return out;
}

TimeSeries negate_series(const TimeSeries& s) {
    TimeSeries out = s;
    for (auto& v : out.values) v = -v;
    return out;
}

TimeSeries censor_at_quantile(const TimeSeries& s, double q, bool upper) {
    const auto obs = s.observed();
    if (obs.empty()) return s;
    const double cut = quantile_linear(obs, q);
    TimeSeries out = s;
    for (auto& v : out.values)
        v = upper ? std::min(v, cut) : std::max(v, cut);
    return out;
}

TimeSeries sobol_quantize(const TimeSeries& s, int levels, uint32_t skip) {
    const double lo = series_min(s.values), hi = series_max(s.values);
    if (hi - lo < 1e-12) return s; // degenerate input passes through
    std::vector<double> grid;
    Sobol1D sobol(skip);
    for (int i = 0; i < levels; ++i) grid.push_back(lo + sobol.next() * (hi - lo));
    std::sort(grid.begin(), grid.end());
    TimeSeries out = s;
    for (auto& v : out.values) {
        double best = grid[0];
        for (double g : grid)
            if (std::abs(g - v) < std::abs(best - v)) best = g;
        v = best;
    }
    return out;
}

namespace {

TimeSeries resample_artifact(const TimeSeries& s, Rng& rng) {
    const size_t n = s.size();
    const int factor = int(rng.uniform_int(2, 4));
    // downsample by striding, upsample back by linear interpolation
    std::vector<double> coarse;
    for (size_t i = 0; i < n; i += size_t(factor)) coarse.push_back(s.values[i]);
    TimeSeries out = s;
    for (size_t t = 0; t < n; ++t) {
        const double pos = double(t) / double(factor);
        const size_t i0 = std::min(size_t(std::floor(pos)), coarse.size() - 1);
        const size_t i1 = std::min(i0 + 1, coarse.size() - 1);
        const double frac = pos - double(i0);
        out.values[t] = (1.0 - frac) * coarse[i0] + frac * coarse[i1];
    }
    return out;
}

} // namespace

TimeSeries apply_category(const TimeSeries& series, CategoryKind kind, Rng& rng,
                          std::string* applied) {
    if (series.size() < 4) return series;
    auto note = [&](const char* name) {
        if (applied) *applied = name;
    };
    switch (kind) {
        case CategoryKind::Invariances:
            if (rng.bernoulli(0.5)) {
                note("reversal");
                return reverse_series(series);
            }
            note("negation");
            return negate_series(series);
        case CategoryKind::Structure:
            if (rng.bernoulli(0.5)) {
                note("piecewise_affine");
                return piecewise_affine(series, rng);
            }
            note("exp_shock");
            return exp_shock(series, rng);
        case CategoryKind::Seasonality:
            if (rng.bernoulli(0.5)) {
                note("calendar");
                return calendar_effects(series, rng);
            }
            note("localized_scaling");
            return localized_scaling(series, rng);
        case CategoryKind::SignalProcessing:
            note("derivative");
            return derivative_like(series, rng);
        case CategoryKind::DiscreteEffects:
            if (rng.bernoulli(0.5)) {
                note("censoring");
                return censor_at_quantile(series, rng.uniform(0.6, 0.95),
                                          rng.bernoulli(0.5));
            }
            note("quantization");
            return sobol_quantize(series, int(rng.uniform_int(4, 16)),
                                  uint32_t(rng.uniform_int(0, 64)));
        case CategoryKind::MeasurementArtifacts:
            note("resample");
            return resample_artifact(series, rng);
    }
    return series;
}

// ------------------------------------------------------------ convolution

std::vector<double> conv_1d(const std::vector<double>& x,
                            const std::vector<double>& kernel, int dilation) {
    const int n = int(x.size());
    const int k = int(kernel.size());
    std::vector<double> y(x.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            const int idx = std::clamp(i + (j - k / 2) * dilation, 0, n - 1);
            acc += kernel[size_t(j)] * x[size_t(idx)];
        }
        y[size_t(i)] = acc;
    }
    return y;
}

TimeSeries random_conv_filter(const TimeSeries& series, Rng& rng) {
    TimeSeries out = series;
    const int passes = int(rng.uniform_int(1, 3));
    for (int p = 0; p < passes; ++p) {
        const int klen = int(rng.uniform_int(3, 15));
        std::vector<double> kernel(size_t(klen), 0.0);
        double l1 = 0.0;
        for (auto& w : kernel) {
            w = rng.normal();
            l1 += std::abs(w);
        }
        if (l1 < 1e-12) l1 = 1.0;
        for (auto& w : kernel) w /= l1;
        const int dilation = int(rng.uniform_int(1, 3));
        out.values = conv_1d(out.values, kernel, dilation);
    }
    return out;
}

// --------------------------------------------------------------- pipeline

std::vector<CategoryKind> sample_categories(Rng& rng, const AugmentationConfig& cfg) {
    const int n = int(rng.uniform_int(cfg.categories_min, cfg.categories_max));
    std::vector<CategoryKind> kinds;
    std::vector<double> weights;
    for (const auto& [k, w] : cfg.category_weights) {
        kinds.push_back(k);
        weights.push_back(w);
    }
    std::vector<CategoryKind> chosen;
    for (int i = 0; i < n && !kinds.empty(); ++i) {
        const size_t pick = rng.weighted_index(weights);
        chosen.push_back(kinds[pick]);
        kinds.erase(kinds.begin() + int64_t(pick));
        weights.erase(weights.begin() + int64_t(pick));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double change_score(const std::vector<double>& source,
                    const std::vector<double>& output) {
    const size_t n = std::min(source.size(), output.size());
    if (n == 0) return 0.0;
    double ms = 0, mo = 0;
    for (size_t i = 0; i < n; ++i) {
        ms += source[i];
        mo += output[i];
    }
    ms /= double(n);
    mo /= double(n);
    double cov = 0, vs = 0, vo = 0, rms = 0;
    for (size_t i = 0; i < n; ++i) {
        const double a = source[i] - ms, b = output[i] - mo;
        cov += a * b;
        vs += a * a;
        vo += b * b;
        const double d = output[i] - source[i];
        rms += d * d;
    }
    const double sd_s = std::sqrt(vs / double(n));
    double corr = 0.0;
    if (vs > 1e-24 && vo > 1e-24) corr = cov / std::sqrt(vs * vo);
    const double nrms = std::min(1.0, std::sqrt(rms / double(n)) / (sd_s + 1e-12));
    return 0.5 * (1.0 - std::abs(corr)) + 0.5 * nrms;
}

namespace {

struct AttemptResult {
    TimeSeries series;
    std::vector<double> source_values;
    std::string stages;
};

AttemptResult run_attempt(const std::vector<TimeSeries>& pool, Rng& r,
                          const AugmentationConfig& cfg) {
    AttemptResult res;
    const size_t idx = size_t(r.uniform_int(0, int64_t(pool.size() - 1)));
    TimeSeries cur = pool[idx];
    res.source_values = cur.values;
    std::string stages;
    auto add = [&](const std::string& s) {
        if (!stages.empty()) stages += ",";
        stages += s;
    };

    if (r.bernoulli(cfg.normalize_prob)) {
        const ScalerKind kind = ScalerKind(r.uniform_int(0, 3));
        cur = apply_scaler(fit_scaler(kind, cur), cur);
        add("norm(" + scaler_kind_name(kind) + ")");
    }

    auto mixup_stage = [&](const char* label) {
        const size_t k =
            std::min(pool.size(), size_t(r.uniform_int(2, 10)));
        std::vector<TimeSeries> sources = {cur};
        bool ok = true;
        for (size_t i = 1; i < k; ++i) {
            const auto& other = pool[size_t(r.uniform_int(0, int64_t(pool.size() - 1)))];
            if (other.size() != cur.size()) {
                ok = false;
                break;
            }
            sources.push_back(other);
        }
        if (!ok || sources.size() < 2) return;
        const bool tv = r.bernoulli(cfg.time_varying_mixup_prob);
        cur = ts_mixup(sources, r, cfg.dirichlet_alpha, tv);
        add(std::string(label) + "(k=" + std::to_string(sources.size()) +
            (tv ? ",tv)" : ")"));
    };

    if (pool.size() >= 2 && r.bernoulli(cfg.early_mixup_prob)) mixup_stage("mixup");

    for (CategoryKind kind : sample_categories(r, cfg)) {
        std::string applied;
        cur = apply_category(cur, kind, r, &applied);
        add(category_name(kind) + "(" + applied + ")");
    }

    if (r.bernoulli(cfg.conv_filter_prob)) {
        cur = random_conv_filter(cur, r);
        add("conv");
    }

    if (pool.size() >= 2 && r.bernoulli(cfg.late_mixup_prob)) mixup_stage("mixup_late");

    // finishing: minor global scale plus Gaussian noise at 1% of the IQR
    const double scale = r.uniform(0.9, 1.1);
    const auto obs = cur.observed();
    const double iqr =
        obs.empty() ? 0.0
                    : quantile_linear(obs, 0.75) - quantile_linear(obs, 0.25);
    const double sigma = cfg.finishing_noise_frac * iqr;
    for (auto& v : cur.values) {
        v *= scale;
        if (sigma > 0.0) v += r.normal(0.0, sigma);
    }
    add("finish");

    res.series = std::move(cur);
    res.stages = std::move(stages);
    return res;
}

} // namespace

TimeSeries augment_with_seed(const std::vector<TimeSeries>& pool, uint64_t seed,
                             const AugmentationConfig& cfg) {
    if (pool.empty()) throw std::invalid_argument("augment_pipeline: empty pool");
    cfg.validate();
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        Rng r(derive_seed(seed, 0xA06u, uint64_t(attempt)));
        AttemptResult res = run_attempt(pool, r, cfg);
        if (change_score(res.source_values, res.series.values) >=
            cfg.selection_threshold) {
            TimeSeries out = std::move(res.series);
            out.provenance += "|aug[seed=" + std::to_string(seed) + "]:" + res.stages;
            return out;
        }
    }
    Rng r0(derive_seed(seed, 0xA06u, 0));
    const size_t idx = size_t(r0.uniform_int(0, int64_t(pool.size() - 1)));
    TimeSeries out = pool[idx];
    out.provenance += "|unaugmented";
    return out;
}

TimeSeries augment_pipeline(const std::vector<TimeSeries>& pool, Rng& rng,
                            const AugmentationConfig& cfg) {
    return augment_with_seed(pool, rng.next_u64(), cfg);
}

std::optional<uint64_t> parse_aug_seed(const std::string& provenance) {
    const std::string tag = "aug[seed=";
    const size_t pos = provenance.rfind(tag);
    if (pos == std::string::npos) return std::nullopt;
    size_t i = pos + tag.size();
    uint64_t seed = 0;
    bool any = false;
    while (i < provenance.size() && provenance[i] >= '0' && provenance[i] <= '9') {
        seed = seed * 10 + uint64_t(provenance[i] - '0');
        ++i;
        any = true;
    }
    if (!any) return std::nullopt;
    return seed;
}

// -------------------------------------------------------------- nan inject

TimeSeries nan_inject(const TimeSeries& series, Rng& rng, double point_rate,
                      double block_rate, double block_mean_len,
                      size_t history_len, double* achieved) {
    if (point_rate < 0.0 || point_rate > 1.0 || block_rate < 0.0 || block_rate > 1.0)
        throw std::invalid_argument("nan_inject: rates out of [0,1]");
    TimeSeries out = series;
    const size_t limit = std::min(history_len, series.size());

    for (size_t i = 0; i < limit; ++i)
        if (point_rate > 0.0 && rng.bernoulli(point_rate)) out.mask[i] = false;

    if (block_rate > 0.0 && block_mean_len >= 1.0) {
        const double p = 1.0 / block_mean_len;
        for (size_t i = 0; i < limit; ++i) {
            if (!rng.bernoulli(block_rate)) continue;
            // geometric block length with mean block_mean_len
            const double u = rng.uniform();
            const size_t len =
                p >= 1.0 ? 1
                         : 1 + size_t(std::floor(std::log1p(-u) / std::log1p(-p)));
            for (size_t j = i; j < std::min(limit, i + len); ++j) out.mask[j] = false;
        }
    }

    if (achieved) {
        size_t missing = 0;
        for (size_t i = 0; i < limit; ++i) missing += !out.mask[i];
        *achieved = limit == 0 ? 0.0 : double(missing) / double(limit);
    }
    return out;
}

} // namespace tempo::aug
