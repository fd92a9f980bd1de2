#include "core/scaler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tempo {

std::string scaler_kind_name(ScalerKind kind) {
    switch (kind) {
        case ScalerKind::Robust: return "robust";
        case ScalerKind::MinMax: return "minmax";
        case ScalerKind::Median: return "median";
        case ScalerKind::Mean: return "mean";
    }
    return "?";
}

double quantile_linear(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of empty set");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

Scaler fit_scaler(ScalerKind kind, const std::vector<double>& observed) {
    if (observed.empty())
        throw std::invalid_argument("fit_scaler: no observed values");

    Scaler s;
    s.kind = kind;
    switch (kind) {
        case ScalerKind::Robust: {
            s.shift = quantile_linear(observed, 0.5);
            s.scale = quantile_linear(observed, 0.75) - quantile_linear(observed, 0.25);
            break;
        }
        case ScalerKind::MinMax: {
            auto [mn, mx] = std::minmax_element(observed.begin(), observed.end());
            s.shift = *mn;
            s.scale = *mx - *mn;
            break;
        }
        case ScalerKind::Median: {
            s.shift = 0.0;
            s.scale = std::abs(quantile_linear(observed, 0.5));
            break;
        }
        case ScalerKind::Mean: {
            s.shift = 0.0;
            s.scale = std::abs(std::accumulate(observed.begin(), observed.end(), 0.0) /
                               static_cast<double>(observed.size()));
            break;
        }
    }
    if (!(s.scale > kScalerEpsilon)) s.scale = kScalerEpsilon;
    return s;
}

Scaler fit_scaler(ScalerKind kind, const TimeSeries& series) {
    return fit_scaler(kind, series.observed());
}

TimeSeries apply_scaler(const Scaler& s, const TimeSeries& series) {
    TimeSeries out = series;
    for (size_t i = 0; i < out.values.size(); ++i)
        if (out.mask[i]) out.values[i] = s.apply(out.values[i]);
    return out;
}

TimeSeries invert_scaler(const Scaler& s, const TimeSeries& series) {
    TimeSeries out = series;
    for (size_t i = 0; i < out.values.size(); ++i)
        if (out.mask[i]) out.values[i] = s.invert(out.values[i]);
    return out;
}

} // namespace tempo
