#pragma once

#include <string>
#include <vector>

#include "core/timeseries.hpp"

namespace tempo {

enum class ScalerKind { Robust, MinMax, Median, Mean };

// Affine value transform x -> (x - shift) / scale, scale > 0 after an
// epsilon guard. Robust: shift = median, scale = IQR; MinMax: min -> 0,
// max -> 1; Median/Mean: shift = 0, scale = |statistic|.
struct Scaler {
    ScalerKind kind = ScalerKind::Robust;
    double shift = 0.0;
    double scale = 1.0;

    double apply(double x) const { return (x - shift) / scale; }
    double invert(double x) const { return x * scale + shift; }
};

constexpr double kScalerEpsilon = 1e-10;

std::string scaler_kind_name(ScalerKind kind);

// Quantile with linear interpolation between order statistics.
double quantile_linear(std::vector<double> sorted_or_not, double q);

// Fits on the observed values only; throws when none are observed.
Scaler fit_scaler(ScalerKind kind, const std::vector<double>& observed);
Scaler fit_scaler(ScalerKind kind, const TimeSeries& series);

// Missing positions pass through unchanged.
TimeSeries apply_scaler(const Scaler& s, const TimeSeries& series);
TimeSeries invert_scaler(const Scaler& s, const TimeSeries& series);

} // namespace tempo
