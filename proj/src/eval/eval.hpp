#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/timeseries.hpp"
#include "nn/model.hpp"

namespace tempo::eval {

struct EvalTask {
    TimeSeries history;
    std::vector<double> target;
    int season = 1;
    std::string id;
};

// Repeats the value one (or the smallest feasible number of) seasonal
// periods earlier; positions with no valid seasonal ancestor fall back to
// the last observed value. Throws when nothing is observed.
std::vector<double> seasonal_naive_forecast(const TimeSeries& history,
                                            int season, size_t horizon);

// Forecast MAE divided by the in-sample seasonal-naive MAE over observed
// pairs. Throws on a degenerate (zero or empty) denominator.
double mase(const std::vector<double>& forecast,
            const std::vector<double>& target, const TimeSeries& history,
            int season);

// Mean over the horizon of (2/|Q|) * sum_q pinball_q(y - yhat_q).
// pred is horizon x |Q| with rows sorted.
double crps_from_quantiles(const nn::Mat& pred,
                           const std::vector<double>& target,
                           const std::vector<double>& quantiles);

struct TaskMetrics {
    std::string id;
    int season = 1;
    size_t horizon = 0;
    double crps = 0.0; // per-task, unnormalized
    double mase = 0.0;
    bool ok = false;
    std::string error;
};

struct MetricReport {
    std::vector<TaskMetrics> tasks;
    // dataset level: summed (2/|Q|) pinball divided by summed |y|
    double crps = 0.0;
    double mase_mean = 0.0;
    // ratios against the seasonal-naive baseline on the same tasks
    double crps_normalized = 0.0;
    double mase_normalized = 0.0;
};

// A forecaster maps a task to a horizon x |Q| quantile matrix in the
// original value domain.
using Forecaster =
    std::function<nn::Mat(const EvalTask&, const std::vector<double>&)>;

Forecaster model_forecaster(const nn::Model& model);
Forecaster seasonal_naive_forecaster();

MetricReport evaluate(const Forecaster& fc, const std::vector<EvalTask>& tasks,
                      const std::vector<double>& quantiles);

void write_report_csv(const MetricReport& report, const std::string& path);
void write_normalized_csv(const MetricReport& report,
                          const std::string& dataset_name,
                          const std::string& path);

struct NanCurvePoint {
    double fraction = 0.0;
    double crps = 0.0;
    double normalized = 0.0; // relative to the 0% entry
};

// Re-evaluates with missing values injected into every history at each
// fraction (fixed per-fraction seeds); the 0% entry normalizes the curve.
std::vector<NanCurvePoint> nan_robustness_curve(
    const Forecaster& fc, const std::vector<EvalTask>& tasks,
    const std::vector<double>& fractions, const std::vector<double>& quantiles,
    uint64_t seed);

void write_curve_csv(const std::vector<NanCurvePoint>& curve,
                     const std::string& path);

} // namespace tempo::eval
