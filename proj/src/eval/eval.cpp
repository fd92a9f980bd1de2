#include "eval/eval.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "aug/augment.hpp"
#include "core/scaler.hpp"
#include "core/time_features.hpp"

namespace tempo::eval {

std::vector<double> seasonal_naive_forecast(const TimeSeries& history,
                                            int season, size_t horizon) {
    if (season < 1) throw std::invalid_argument("seasonal naive: season < 1");
    const long T = long(history.size());
    double last_observed = 0.0;
    bool any = false;
    for (long t = 0; t < T; ++t)
        if (history.mask[size_t(t)]) {
            last_observed = history.values[size_t(t)];
            any = true;
        }
    if (!any) throw std::invalid_argument("seasonal naive: no observed values");

    std::vector<double> out;
    for (size_t k = 0; k < horizon; ++k) {
        const long pos = T + long(k);
        double v = last_observed;
        for (long idx = pos - season; idx >= 0; idx -= season) {
            if (idx < T && history.mask[size_t(idx)]) {
                v = history.values[size_t(idx)];
                break;
            }
        }
        out.push_back(v);
    }
    return out;
}

double mase(const std::vector<double>& forecast,
            const std::vector<double>& target, const TimeSeries& history,
            int season) {
    if (forecast.size() != target.size() || target.empty())
        throw std::invalid_argument("mase: bad forecast/target");
    double denom = 0.0;
    size_t pairs = 0;
    for (size_t t = size_t(season); t < history.size(); ++t) {
        if (!history.mask[t] || !history.mask[t - size_t(season)]) continue;
        denom += std::abs(history.values[t] - history.values[t - size_t(season)]);
        ++pairs;
    }
    if (pairs == 0) throw std::invalid_argument("mase: no seasonal pairs");
    denom /= double(pairs);
    if (denom == 0.0)
        throw std::invalid_argument("mase: degenerate seasonal history");
    double num = 0.0;
    for (size_t k = 0; k < target.size(); ++k)
        num += std::abs(target[k] - forecast[k]);
    return num / double(target.size()) / denom;
}

namespace {

// summed (2/|Q|) pinball over the horizon, before any normalization
double crps_sum(const nn::Mat& pred, const std::vector<double>& target,
                const std::vector<double>& quantiles) {
    if (pred.rows() != Eigen::Index(target.size()) ||
        pred.cols() != Eigen::Index(quantiles.size()))
        throw std::invalid_argument("crps: shape mismatch");
    double sum = 0.0;
    for (size_t k = 0; k < target.size(); ++k) {
        double s = 0.0;
        for (size_t iq = 0; iq < quantiles.size(); ++iq) {
            const double e = target[k] - pred(Eigen::Index(k), Eigen::Index(iq));
            s += std::max(quantiles[iq] * e, (quantiles[iq] - 1.0) * e);
        }
        sum += 2.0 * s / double(quantiles.size());
    }
    return sum;
}

} // namespace

double crps_from_quantiles(const nn::Mat& pred,
                           const std::vector<double>& target,
                           const std::vector<double>& quantiles) {
    if (target.empty()) throw std::invalid_argument("crps: empty target");
    return crps_sum(pred, target, quantiles) / double(target.size());
}

Forecaster model_forecaster(const nn::Model& model) {
    return [&model](const EvalTask& task, const std::vector<double>& quantiles) {
        if (quantiles != model.config.quantiles)
            throw std::invalid_argument("model forecaster: quantile set mismatch");
        nn::SeqData sd;
        const auto obs = task.history.observed();
        sd.scaler = obs.empty() ? Scaler{ScalerKind::Robust, 0.0, 1.0}
                                : fit_scaler(ScalerKind::Robust, obs);
        for (size_t t = 0; t < task.history.size(); ++t) {
            sd.values.push_back(sd.scaler.apply(task.history.values[t]));
            sd.mask.push_back(task.history.mask[t]);
        }
        sd.horizon = task.target.size();
        sd.feats = time_features(task.history.start, task.history.freq,
                                 task.history.size(), sd.horizon);
        auto fc = nn::forward(model, nn::TokenBatch{{sd}});
        return fc[0].quantiles;
    };
}

Forecaster seasonal_naive_forecaster() {
    return [](const EvalTask& task, const std::vector<double>& quantiles) {
        const auto point = seasonal_naive_forecast(task.history, task.season,
                                                   task.target.size());
        nn::Mat out(Eigen::Index(point.size()), Eigen::Index(quantiles.size()));
        for (size_t k = 0; k < point.size(); ++k) out.row(Eigen::Index(k)).setConstant(point[k]);
        return out;
    };
}

MetricReport evaluate(const Forecaster& fc, const std::vector<EvalTask>& tasks,
                      const std::vector<double>& quantiles) {
    if (tasks.empty()) throw std::invalid_argument("evaluate: no tasks");
    const Forecaster naive = seasonal_naive_forecaster();

    MetricReport rep;
    double loss_sum = 0.0, abs_sum = 0.0, mase_sum = 0.0;
    double naive_loss_sum = 0.0, naive_mase_sum = 0.0;
    size_t ok_count = 0;
    for (const auto& task : tasks) {
        TaskMetrics tm;
        tm.id = task.id;
        tm.season = task.season;
        tm.horizon = task.target.size();
        try {
            const nn::Mat pred = fc(task, quantiles);
            const nn::Mat npred = naive(task, quantiles);
            std::vector<double> median(task.target.size());
            const Eigen::Index mid = Eigen::Index(quantiles.size()) / 2;
            for (size_t k = 0; k < task.target.size(); ++k)
                median[k] = pred(Eigen::Index(k), mid);
            tm.crps = crps_from_quantiles(pred, task.target, quantiles);
            tm.mase = mase(median, task.target, task.history, task.season);
            std::vector<double> npoint(task.target.size());
            for (size_t k = 0; k < task.target.size(); ++k)
                npoint[k] = npred(Eigen::Index(k), 0);
            loss_sum += crps_sum(pred, task.target, quantiles);
            naive_loss_sum += crps_sum(npred, task.target, quantiles);
            for (double y : task.target) abs_sum += std::abs(y);
            mase_sum += tm.mase;
            naive_mase_sum += mase(npoint, task.target, task.history, task.season);
            tm.ok = true;
            ++ok_count;
        } catch (const std::exception& e) {
            tm.error = e.what();
        }
        rep.tasks.push_back(std::move(tm));
    }
    if (ok_count > 0) {
        rep.crps = abs_sum > 0.0 ? loss_sum / abs_sum : loss_sum;
        rep.mase_mean = mase_sum / double(ok_count);
        const double naive_crps =
            abs_sum > 0.0 ? naive_loss_sum / abs_sum : naive_loss_sum;
        rep.crps_normalized = naive_crps > 0.0 ? rep.crps / naive_crps : 0.0;
        const double naive_mase = naive_mase_sum / double(ok_count);
        rep.mase_normalized = naive_mase > 0.0 ? rep.mase_mean / naive_mase : 0.0;
    }
    return rep;
}

void write_report_csv(const MetricReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("report: cannot open " + path);
    f.precision(17);
    f << "task_id,season,horizon,crps,mase,ok,error\n";
    for (const auto& t : report.tasks)
        f << t.id << "," << t.season << "," << t.horizon << "," << t.crps << ","
          << t.mase << "," << (t.ok ? 1 : 0) << "," << t.error << "\n";
    f << "aggregate,," << "," << report.crps << "," << report.mase_mean
      << ",,\n";
}

void write_normalized_csv(const MetricReport& report,
                          const std::string& dataset_name,
                          const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("report: cannot open " + path);
    f.precision(17);
    f << "dataset,crps,mase,crps_normalized,mase_normalized\n";
    f << dataset_name << "," << report.crps << "," << report.mase_mean << ","
      << report.crps_normalized << "," << report.mase_normalized << "\n";
}

std::vector<NanCurvePoint> nan_robustness_curve(
    const Forecaster& fc, const std::vector<EvalTask>& tasks,
    const std::vector<double>& fractions, const std::vector<double>& quantiles,
    uint64_t seed) {
    std::vector<NanCurvePoint> curve;
    const double base = evaluate(fc, tasks, quantiles).crps;
    for (size_t fi = 0; fi < fractions.size(); ++fi) {
        const double frac = fractions[fi];
        std::vector<EvalTask> injected = tasks;
        if (frac > 0.0) {
            for (size_t ti = 0; ti < injected.size(); ++ti) {
                Rng rng(derive_seed(seed, 0x4E414E, fi * 1000003 + ti));
                injected[ti].history = aug::nan_inject(
                    injected[ti].history, rng, frac, 0.0, 1.0,
                    injected[ti].history.size());
            }
        }
        MetricReport rep = evaluate(fc, injected, quantiles);
        NanCurvePoint pt;
        pt.fraction = frac;
        pt.crps = rep.crps;
        pt.normalized =
            frac == 0.0 ? 1.0 : (base > 0.0 ? rep.crps / base : 0.0);
        curve.push_back(pt);
    }
    return curve;
}

void write_curve_csv(const std::vector<NanCurvePoint>& curve,
                     const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("curve: cannot open " + path);
    f.precision(17);
    f << "fraction,crps,crps_normalized\n";
    for (const auto& p : curve)
        f << p.fraction << "," << p.crps << "," << p.normalized << "\n";
}

} // namespace tempo::eval
