// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aug/augment.hpp"
#include "core/frequency.hpp"
#include "eval/eval.hpp"
#include "gp/kernels.hpp"
#include "gp/sample.hpp"
#include "nn/model.hpp"
#include "nn/recurrence.hpp"
#include "sde/fbm.hpp"
#include "sde/ou.hpp"
#include "sde/regime.hpp"
#include "train/train.hpp"

using namespace tempo;
using nn::Mat;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int num, const std::string& what, bool ok,
            const std::string& detail, double seconds) {
    std::printf("%s - %2d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", num,
                what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void run(int num, const std::string& what,
         const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    report(num, what, ok, detail, secs);
}

// ------------------------------------------------------------ shared helpers

struct RecInputs {
    nn::RecurrenceDims dims;
    Mat q, beta, alpha, h0;
    std::vector<Mat> keys, values;
    std::vector<bool> valid;
};

RecInputs random_rec(Rng& rng, int heads, int dh, int n_h, int batch, int T,
                     bool ragged) {
    RecInputs in;
    in.dims = {heads, dh, n_h, batch, T};
    const int d = heads * dh;
    const int N = batch * T;
    auto fill = [&](int rows, int cols) {
        Mat m(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = rng.normal();
        return m;
    };
    in.q = fill(d, N);
    for (int j = 0; j < n_h; ++j) {
        Mat k = fill(d, N);
        for (int c = 0; c < N; ++c)
            for (int h = 0; h < heads; ++h) {
                auto seg = k.col(c).segment(h * dh, dh);
                seg /= std::sqrt(seg.squaredNorm() + 1e-12);
            }
        in.keys.push_back(std::move(k));
        in.values.push_back(fill(d, N));
    }
    in.beta = Mat(heads * n_h, N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < heads * n_h; ++r)
            in.beta(r, c) = rng.uniform(0.0, 2.0);
    in.alpha = Mat(heads, N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < heads; ++r) in.alpha(r, c) = rng.uniform(0.3, 1.0);
    in.h0 = 0.3 * fill(d, dh * batch);
    in.valid.assign(size_t(N), true);
    if (ragged)
        for (int b = 0; b < batch; ++b) {
            const int len = int(rng.uniform_int(1, T));
            for (int t = len; t < T; ++t) in.valid[size_t(b * T + t)] = false;
        }
    return in;
}

nn::SeqData make_seq(uint64_t seed, size_t history, size_t horizon) {
    Rng rng(seed);
    nn::SeqData s;
    for (size_t t = 0; t < history; ++t) {
        s.values.push_back(rng.normal());
        s.mask.push_back(rng.uniform() > 0.15);
    }
    s.horizon = horizon;
    s.feats = time_features(0, {FreqUnit::Hours, 1}, history, horizon);
    s.scaler = {ScalerKind::Robust, 0.0, 1.0};
    for (size_t k = 0; k < horizon; ++k) {
        s.target.push_back(rng.normal());
        s.target_mask.push_back(true);
    }
    return s;
}

double lag1_autocorr(const std::vector<double>& x) {
    const size_t n = x.size();
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
        den += (x[i] - mean) * (x[i] - mean);
        if (i + 1 < n) num += (x[i] - mean) * (x[i + 1] - mean);
    }
    return num / den;
}

double variance_scaling_slope(const std::vector<double>& inc, double dt) {
    std::vector<double> path(inc.size() + 1, 0.0);
    for (size_t i = 0; i < inc.size(); ++i) path[i + 1] = path[i] + inc[i];
    std::vector<double> xs, ys;
    for (size_t lag = 1; lag <= 64; lag *= 2) {
        double sq = 0;
        size_t cnt = 0;
        for (size_t i = 0; i + lag < path.size(); ++i) {
            const double d = path[i + lag] - path[i];
            sq += d * d;
            ++cnt;
        }
        xs.push_back(std::log(double(lag) * dt));
        ys.push_back(std::log(sq / double(cnt)));
    }
    const size_t n = xs.size();
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(n);
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(n);
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

TimeSeries modulated_sine(Rng& rng, size_t length) {
    const double period = rng.uniform(8.0, 16.0);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    const double amp = rng.uniform(0.5, 2.0);
    const double mod_period = rng.uniform(40.0, 90.0);
    const double mod_phase = rng.uniform(0.0, 2.0 * kPi);
    std::vector<double> v(length);
    for (size_t t = 0; t < length; ++t)
        v[t] = amp *
               (1.0 + 0.3 * std::sin(2.0 * kPi * double(t) / mod_period +
                                     mod_phase)) *
               std::sin(2.0 * kPi * double(t) / period + phase);
    TimeSeries ts = TimeSeries::with_values(std::move(v));
    ts.freq = {FreqUnit::Hours, 1};
    return ts;
}

std::vector<eval::EvalTask> heldout_sine_tasks(size_t count, size_t history,
                                               size_t horizon) {
    std::vector<eval::EvalTask> tasks;
    for (size_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(424242, 0xE7A1, i));
        TimeSeries full = modulated_sine(rng, history + horizon);
        eval::EvalTask t;
        t.history = full;
        t.history.values.resize(history);
        t.history.mask.resize(history);
        t.target.assign(full.values.begin() + int64_t(history),
                        full.values.end());
        t.season = seasonal_period(full.freq);
        t.id = "sine" + std::to_string(i);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "<missing:" + path + ">";
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    return std::system((cmd + " > /dev/null 2>&1").c_str());
}

// shared across criteria 12 and 13
nn::Model* g_toy_model = nullptr;

// ---------------------------------------------------------------- criteria

bool c1_recurrence(std::string& detail) {
    Rng rng(301);
    double worst64 = 0.0;
    float worst32 = 0.0f;
    for (int rep = 0; rep < 50; ++rep) {
        const int heads = int(rng.uniform_int(1, 4));
        const int dh = int(rng.uniform_int(2, 32));
        const int n_h = int(rng.uniform_int(1, 3));
        const int batch = int(rng.uniform_int(1, 3));
        const int T = int(rng.uniform_int(2, 128));
        const int chunk = int(rng.uniform_int(1, 17));
        RecInputs in = random_rec(rng, heads, dh, n_h, batch, T, rep % 2 == 1);
        Mat o1, h1, o2, h2;
        nn::recurrence_sequential<double>(in.dims, in.q, in.keys, in.values,
                                          in.beta, in.alpha, in.h0, in.valid,
                                          o1, h1);
        nn::recurrence_chunkwise<double>(in.dims, in.q, in.keys, in.values,
                                         in.beta, in.alpha, in.h0, in.valid,
                                         chunk, o2, h2);
        worst64 = std::max(worst64, (o1 - o2).cwiseAbs().maxCoeff());
        worst64 = std::max(worst64, (h1 - h2).cwiseAbs().maxCoeff());

        std::vector<nn::MatX<float>> kf, vf;
        for (const auto& m : in.keys) kf.push_back(m.cast<float>());
        for (const auto& m : in.values) vf.push_back(m.cast<float>());
        nn::MatX<float> o3, h3, o4, h4;
        nn::recurrence_sequential<float>(
            in.dims, in.q.cast<float>(), kf, vf, in.beta.cast<float>(),
            in.alpha.cast<float>(), in.h0.cast<float>(), in.valid, o3, h3);
        nn::recurrence_chunkwise<float>(
            in.dims, in.q.cast<float>(), kf, vf, in.beta.cast<float>(),
            in.alpha.cast<float>(), in.h0.cast<float>(), in.valid, chunk, o4,
            h4);
        worst32 = std::max(worst32, (o3 - o4).cwiseAbs().maxCoeff());
        worst32 = std::max(worst32, (h3 - h4).cwiseAbs().maxCoeff());
    }
    std::ostringstream ss;
    ss << "max err f64 " << worst64 << ", f32 " << worst32;
    detail = ss.str();
    return worst64 <= 1e-10 && worst32 <= 1e-4f;
}

bool c2_gradients(std::string& detail) {
    Rng rng(302);
    nn::Model m = nn::Model::init(nn::ModelConfig::toy(), rng);
    nn::TokenBatch batch{{make_seq(311, 24, 8), make_seq(312, 24, 8)}};
    nn::loss_and_gradients(m, batch);
    std::vector<Mat> grads;
    for (const auto& t : m.tensors) grads.push_back(t.grad);

    Rng pick(303);
    const double h = 1e-5;
    int passed = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        const size_t ti =
            size_t(pick.uniform_int(0, int64_t(m.tensors.size()) - 1));
        nn::Tensor& t = m.tensors[ti];
        const Eigen::Index fi = pick.uniform_int(0, t.value.size() - 1);
        const double orig = t.value.data()[fi];
        t.value.data()[fi] = orig + h;
        const double lp = nn::loss_value(m, batch);
        t.value.data()[fi] = orig - h;
        const double lm = nn::loss_value(m, batch);
        t.value.data()[fi] = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double g = grads[ti].data()[fi];
        if (std::abs(fd - g) <=
            1e-6 + 1e-4 * std::max(std::abs(fd), std::abs(g)))
            ++passed;
    }
    detail = std::to_string(passed) + "/200 coordinates within 1e-4";
    return passed >= 198;
}

bool c3_householder(std::string& detail) {
    Rng rng(304);
    const int n = 12;
    auto unit = [&] {
        Eigen::VectorXd k(n);
        for (int i = 0; i < n; ++i) k(i) = rng.normal();
        return Eigen::VectorXd(k / k.norm());
    };
    double worst_norm = 0.0, worst_eig = 0.0, worst_exp = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        // beta = 2: pure reflection, preserves norms
        Eigen::VectorXd k = unit();
        Mat F = Mat::Identity(n, n) - 2.0 * k * k.transpose();
        Eigen::VectorXd x = Eigen::VectorXd::Random(n);
        worst_norm = std::max(worst_norm,
                              std::abs((F * x).norm() - x.norm()));
        // eigenvalue -1 along k
        worst_eig = std::max(worst_eig, (F * k + k).cwiseAbs().maxCoeff());
        // compositions with beta in [0,2] and a forget gate never expand
        Mat A = Mat::Identity(n, n);
        for (int j = 0; j < 4; ++j) {
            Eigen::VectorXd kk = unit();
            A = (Mat::Identity(n, n) -
                 rng.uniform(0.0, 2.0) * kk * kk.transpose()) *
                A;
        }
        A *= rng.uniform(0.0, 1.0);
        worst_exp = std::max(worst_exp, (A * x).norm() / x.norm());
    }
    std::ostringstream ss;
    ss << "norm drift " << worst_norm << ", eig resid " << worst_eig
       << ", max gain " << worst_exp;
    detail = ss.str();
    return worst_norm < 1e-10 && worst_eig < 1e-10 &&
           worst_exp <= 1.0 + 1e-12;
}

bool c4_param_count(std::string& detail) {
    Rng rng(305);
    nn::Model m = nn::Model::init(nn::ModelConfig{}, rng);
    const double n = double(m.param_count());
    const double target = 34.69e6;
    std::ostringstream ss;
    ss << m.param_count() << " parameters, target 34.69M";
    detail = ss.str();
    return std::abs(n - target) / target < 0.10;
}

bool c5_ou(std::string& detail) {
    sde::OUConfig c;
    c.regime.theta = {2.0, 2.0};
    c.regime.mu = {1.0, 1.0};
    c.regime.sigma = {0.5, 0.5};
    c.p00 = c.p11 = 0.999;
    c.dt = 0.01;
    c.length = 222222; // ~2e5 steps after the 10% burn-in
    c.burn_in_frac = 0.1;
    Rng rng(306);
    auto ts = sde::simulate_ou(c, rng);
    const double mean =
        std::accumulate(ts.values.begin(), ts.values.end(), 0.0) /
        double(ts.size());
    double var = 0;
    for (double v : ts.values) var += (v - mean) * (v - mean);
    var /= double(ts.size());

    // sigma -> 0: Euler recursion against the exact ODE relaxation
    sde::OUConfig d;
    d.regime.theta = {2.0, 2.0};
    d.regime.mu = {0.0, 0.0};
    d.regime.sigma = {1e-300, 1e-300};
    d.mu_trends = {
        sde::TrendSpec{sde::TrendKind::PiecewiseLinear, {0.0, 1.0, 1.0, 1.0}}};
    d.p00 = d.p11 = 0.999999;
    d.burn_in_frac = 0.0;
    auto ode_err = [&](double dt) {
        sde::OUConfig dd = d;
        dd.dt = dt;
        dd.length = size_t(std::lround(1.0 / dt));
        Rng r(77);
        auto path = sde::simulate_ou(dd, r);
        double max_err = 0.0;
        for (size_t i = 0; i < path.size(); ++i) {
            const double t = double(i + 1) * dt;
            max_err = std::max(max_err, std::abs(path.values[i] -
                                                 (1.0 - std::exp(-2.0 * t))));
        }
        return max_err;
    };
    const double e1 = ode_err(0.02);
    const double e2 = ode_err(0.01);
    const double ratio = e1 / e2;
    std::ostringstream ss;
    ss << "mean " << mean << ", var " << var << " (target 0.0625), dt-halving "
       << ratio << "x";
    detail = ss.str();
    return std::abs(mean - 1.0) <= 0.05 &&
           std::abs(var - 0.0625) <= 0.1 * 0.0625 && ratio > 1.5 &&
           ratio < 2.5;
}

bool c6_fbm(std::string& detail) {
    std::ostringstream ss;
    bool ok = true;
    for (double H : {0.3, 0.5, 0.7}) {
        Rng rng(uint64_t(1000 * H));
        auto inc = sde::fbm_increments(rng, 65536, H, 0.01);
        const double slope = variance_scaling_slope(inc, 0.01);
        ss << "H=" << H << " slope " << slope << "; ";
        ok = ok && std::abs(slope - 2.0 * H) <= 0.1;
    }
    Rng rng(307);
    auto inc = sde::fbm_increments(rng, 100000, 0.5, 0.01);
    const double rho = lag1_autocorr(inc);
    ss << "H=0.5 rho1 " << rho;
    detail = ss.str();
    return ok && std::abs(rho) < 0.01;
}

bool c7_regime(std::string& detail) {
    Rng rng(308);
    const double p00 = 0.95, p11 = 0.9;
    auto path = sde::simulate_regime_chain(rng, 1000000, p00, p11);
    size_t stay0 = 0, from0 = 0, stay1 = 0, from1 = 0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        if (path[i] == 0) {
            ++from0;
            stay0 += path[i + 1] == 0;
        } else {
            ++from1;
            stay1 += path[i + 1] == 1;
        }
    }
    const double f0 = double(stay0) / double(from0);
    const double f1 = double(stay1) / double(from1);
    std::ostringstream ss;
    ss << "stay0 " << f0 << " vs 0.95, stay1 " << f1 << " vs 0.9";
    detail = ss.str();
    return std::abs(f0 - p00) < 0.01 && std::abs(f1 - p11) < 0.01;
}

bool c8_gp(std::string& detail) {
    std::vector<double> t(16);
    for (int i = 0; i < 16; ++i) t[size_t(i)] = double(i);

    gp::CompositeKernel white;
    white.root.leaf = gp::White{1.0};
    const auto Kw = gp::gram(white, t);
    const double id_err =
        (Kw - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff();

    gp::CompositeKernel rbf;
    rbf.root.leaf = gp::RBF{1.0};
    const auto Kr = gp::gram(rbf, t);
    const double lag1_err = std::abs(Kr(0, 1) - std::exp(-0.5));

    gp::CompositeKernel mix;
    mix.root.is_leaf = false;
    mix.root.op = gp::KernelOp::Sum;
    gp::CompositeKernel::Node l1, l2;
    l1.leaf = gp::RBF{2.0};
    l2.leaf = gp::White{0.25};
    mix.root.children = {l1, l2};
    std::vector<double> g8(t.begin(), t.begin() + 8);
    const auto K = gp::gram(mix, g8);
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(8, 8);
    Rng rng(309);
    const int paths = 20000;
    for (int p = 0; p < paths; ++p) {
        auto path = gp::sample_gp(mix, g8, rng);
        Eigen::Map<Eigen::VectorXd> v(path.data(), 8);
        emp += v * v.transpose();
    }
    emp /= double(paths);
    const double rel = (emp - K).norm() / K.norm();
    std::ostringstream ss;
    ss << "identity err " << id_err << ", rbf lag1 err " << lag1_err
       << ", cov rel " << rel;
    detail = ss.str();
    return id_err == 0.0 && lag1_err < 1e-12 && rel < 0.05;
}

bool c9_augment(std::string& detail) {
    Rng mk(310);
    auto make = [&](size_t n) {
        std::vector<double> v(n);
        double acc = 0.0;
        for (auto& x : v) acc += mk.normal(), x = acc + 0.5 * mk.normal();
        TimeSeries ts = TimeSeries::with_values(std::move(v));
        ts.freq = {FreqUnit::Hours, 1};
        return ts;
    };

    // involutions
    auto a = make(97);
    a.mask[5] = false;
    auto rr = aug::reverse_series(aug::reverse_series(a));
    auto nn2 = aug::negate_series(aug::negate_series(a));
    const bool involutions = rr.values == a.values && rr.mask == a.mask &&
                             nn2.values == a.values;

    // censoring clips at the quantile
    auto b = make(500);
    const double cut = quantile_linear(b.observed(), 0.8);
    auto censored = aug::censor_at_quantile(b, 0.8, true);
    bool clipped = true;
    for (double v : censored.values) clipped = clipped && v <= cut + 1e-12;

    // quantization level count
    auto q = aug::sobol_quantize(b, 8, 0);
    std::set<double> levels(q.values.begin(), q.values.end());
    const bool quantized = levels.size() <= 8;

    // category inclusion frequencies vs an independent Monte-Carlo oracle
    aug::AugmentationConfig cfg;
    std::vector<aug::CategoryKind> kinds;
    std::vector<double> weights;
    for (const auto& [k, w] : cfg.category_weights) {
        kinds.push_back(k);
        weights.push_back(w);
    }
    std::map<aug::CategoryKind, int> observed, oracle;
    const int runs = 10000, oracle_runs = 200000;
    Rng rng(311);
    for (int i = 0; i < runs; ++i)
        for (auto k : aug::sample_categories(rng, cfg)) observed[k]++;
    Rng orng(312);
    for (int i = 0; i < oracle_runs; ++i) {
        const int n = int(orng.uniform_int(cfg.categories_min,
                                           cfg.categories_max));
        std::vector<double> w = weights;
        for (int pickn = 0; pickn < n; ++pickn) {
            const size_t j = orng.weighted_index(w);
            oracle[kinds[j]]++;
            w[j] = 0.0;
        }
    }
    double worst_freq = 0.0;
    for (auto k : kinds)
        worst_freq = std::max(
            worst_freq, std::abs(double(observed[k]) / runs -
                                 double(oracle[k]) / oracle_runs));

    // provenance replay
    std::vector<TimeSeries> pool;
    for (size_t i = 0; i < 5; ++i) pool.push_back(make(96));
    bool replays = true;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        Rng r(seed);
        auto out = aug::augment_pipeline(pool, r);
        auto rs = aug::parse_aug_seed(out.provenance);
        if (!rs) continue;
        auto again = aug::augment_with_seed(pool, *rs);
        replays = replays && again.values == out.values &&
                  again.provenance == out.provenance;
    }
    std::ostringstream ss;
    ss << "involutions " << involutions << ", clip " << clipped << ", levels "
       << quantized << ", worst freq gap " << worst_freq << ", replay "
       << replays;
    detail = ss.str();
    return involutions && clipped && quantized && worst_freq <= 0.02 &&
           replays;
}

bool c10_metrics(std::string& detail) {
    const std::vector<double> q9 = {0.1, 0.2, 0.3, 0.4, 0.5,
                                    0.6, 0.7, 0.8, 0.9};
    TimeSeries h = TimeSeries::with_values({1, 2, 3, 4});
    auto f = eval::seasonal_naive_forecast(h, 2, 3);
    const bool naive_ok = f.size() == 3 && f[0] == 3.0 && f[1] == 4.0 &&
                          f[2] == 3.0;

    TimeSeries hm = TimeSeries::with_values({1, 2, 2, 3});
    const double m = eval::mase({2, 4}, {3, 3}, hm, 2);
    const bool mase_ok = std::abs(m - 1.0) < 1e-12;

    Mat zeros(1, 9);
    zeros.setZero();
    const double crps9 = eval::crps_from_quantiles(zeros, {1.0}, q9);
    const bool crps_ok = std::abs(crps9 - 1.0) < 1e-12;

    // baseline against itself
    std::vector<eval::EvalTask> tasks = heldout_sine_tasks(10, 48, 12);
    auto rep = eval::evaluate(eval::seasonal_naive_forecaster(), tasks, q9);
    const bool self_one =
        rep.crps_normalized == 1.0 && rep.mase_normalized == 1.0;

    // single-median CRPS == MAE
    Rng rng(313);
    bool median_ok = true;
    for (int i = 0; i < 1000; ++i) {
        const size_t n = size_t(rng.uniform_int(1, 8));
        Mat p(Eigen::Index(n), 1);
        std::vector<double> y(n);
        double mae = 0.0;
        for (size_t k = 0; k < n; ++k) {
            p(Eigen::Index(k), 0) = rng.normal();
            y[k] = rng.normal();
            mae += std::abs(y[k] - p(Eigen::Index(k), 0));
        }
        mae /= double(n);
        median_ok = median_ok &&
                    std::abs(eval::crps_from_quantiles(p, y, {0.5}) - mae) <
                        1e-12 * std::max(1.0, mae);
    }
    std::ostringstream ss;
    ss << "naive " << naive_ok << ", mase " << mase_ok << ", crps " << crps_ok
       << ", self-norm " << self_one << ", median==mae " << median_ok;
    detail = ss.str();
    return naive_ok && mase_ok && crps_ok && self_one && median_ok;
}

bool c11_structure(std::string& detail) {
    train::TrainConfig cfg;
    Rng rng(314);
    std::map<size_t, int> lens;
    int cuts = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto s = train::sample_structure(rng, cfg);
        lens[s.total_len]++;
        cuts += s.mode == train::ShortenMode::Cut;
    }
    double worst = 0.0;
    for (const auto& [len, p] : cfg.length_distribution)
        worst = std::max(worst, std::abs(double(lens[len]) / n - p));
    const double cut_gap = std::abs(double(cuts) / n - 0.5);
    std::ostringstream ss;
    ss << "worst length gap " << worst << ", cut split gap " << cut_gap;
    detail = ss.str();
    return worst < 0.01 && cut_gap < 0.01;
}

bool c12_toy_learning(std::string& detail) {
    nn::ModelConfig mc;
    mc.embed_dim = 64;
    mc.layers = 2;
    mc.heads = 2;
    mc.householders = 2;
    mc.conv_kernel = 4;
    mc.mlp_hidden = 128;
    Rng rng(315);
    static nn::Model model = nn::Model::init(mc, rng);

    train::TrainConfig tc;
    tc.iterations = 2000;
    tc.batch_size = 32;
    tc.accumulation = 1;
    tc.peak_lr = 3e-4;
    tc.length_distribution = {{48, 1.0}};
    tc.horizon_min = 4;
    tc.horizon_max = 8;
    tc.cut_vs_subsample = 1.0;
    tc.scaler_aug_prob = 0.0;
    tc.nan_aug.prob = 0.0;
    tc.seed = 316;

    std::vector<train::BatchSource> sources = {
        {"sine", 1.0, [](Rng& r) { return modulated_sine(r, 128); }}};
    train::OptimizerState opt = train::OptimizerState::init(model);
    auto losses = train::train(model, opt, sources, tc, {});

    auto mean_of = [&](size_t begin, size_t end) {
        return std::accumulate(losses.begin() + int64_t(begin),
                               losses.begin() + int64_t(end), 0.0) /
               double(end - begin);
    };
    const double first = mean_of(0, 50);
    const double last = mean_of(losses.size() - 50, losses.size());

    auto tasks = heldout_sine_tasks(50, 40, 8);
    auto rep = eval::evaluate(eval::model_forecaster(model), tasks,
                              model.config.quantiles);
    g_toy_model = &model;
    std::ostringstream ss;
    ss << "loss " << first << " -> " << last << " (" << last / first
       << "x), heldout MASE " << rep.mase_mean << ", vs baseline "
       << rep.mase_normalized;
    detail = ss.str();
    return last <= 0.2 * first && rep.mase_mean < 1.0;
}

bool c13_nan_sweep(std::string& detail) {
    if (!g_toy_model) {
        detail = "toy model unavailable (criterion 12 failed earlier)";
        return false;
    }
    auto tasks = heldout_sine_tasks(50, 40, 8);
    const std::vector<double> fracs = {0.0, 0.3, 0.6, 0.9};
    auto curve = eval::nan_robustness_curve(
        eval::model_forecaster(*g_toy_model), tasks, fracs,
        g_toy_model->config.quantiles, 317);
    const std::string path = "acceptance_nan_curve.csv";
    eval::write_curve_csv(curve, path);

    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    bool schema = line == "fraction,crps,crps_normalized";
    size_t rows = 0;
    while (std::getline(f, line)) {
        double a, b2, c;
        char comma1, comma2;
        std::istringstream ls(line);
        schema = schema && bool(ls >> a >> comma1 >> b2 >> comma2 >> c) &&
                 comma1 == ',' && comma2 == ',';
        ++rows;
    }
    std::remove(path.c_str());
    const bool zero_one = curve.size() == 4 && curve[0].normalized == 1.0;
    std::ostringstream ss;
    ss << "relative CRPS at {0,.3,.6,.9}: ";
    for (const auto& p : curve) ss << p.normalized << " ";
    ss << "(degradation reported, not asserted)";
    detail = ss.str();
    return zero_one && schema && rows == 4;
}

bool c14_determinism(std::string& detail) {
#ifndef CLI_PATH
    detail = "CLI path not configured";
    return false;
#else
    const std::string cli = CLI_PATH;
    auto cleanup = [](const std::vector<std::string>& files) {
        for (const auto& f : files) std::remove(f.c_str());
    };

    {
        std::ofstream cfg("acc_cfg.json");
        cfg << R"({"master_seed": 99,
                   "generation": {"generators": ["sine_wave", "sde"],
                                  "length": 96},
                   "training": {"iterations": 3, "batch_size": 2,
                                "length_distribution": {"32": 1.0},
                                "horizon_min": 4, "horizon_max": 8},
                   "model": {"embed_dim": 32, "layers": 2, "heads": 2,
                             "householders": 2, "conv_kernel": 4,
                             "mlp_hidden": 48}})";
    }

    bool gen_ok = shell(cli + " generate --config acc_cfg.json --count 10"
                              " --workers 1 --out acc_g1.jsonl") == 0 &&
                  shell(cli + " generate --config acc_cfg.json --count 10"
                              " --workers 4 --out acc_g2.jsonl") == 0 &&
                  shell(cli + " generate --config acc_cfg.json --count 10"
                              " --workers 1 --out acc_g3.jsonl") == 0;
    const std::string g1 = slurp("acc_g1.jsonl");
    gen_ok = gen_ok && g1 == slurp("acc_g2.jsonl") &&
             g1 == slurp("acc_g3.jsonl");

    bool trn_ok =
        shell(cli + " train --config acc_cfg.json --out acc_m1.ckpt"
                    " --loss-csv acc_l1.csv") == 0 &&
        shell(cli + " train --config acc_cfg.json --out acc_m2.ckpt"
                    " --loss-csv acc_l2.csv") == 0;
    trn_ok = trn_ok && slurp("acc_m1.ckpt") == slurp("acc_m2.ckpt") &&
             slurp("acc_l1.csv") == slurp("acc_l2.csv");

    bool evl_ok =
        shell(cli + " evaluate --in acc_g1.jsonl --horizon 8"
                    " --report-out acc_r1.csv --normalized-out acc_n1.csv") ==
            0 &&
        shell(cli + " evaluate --in acc_g1.jsonl --horizon 8"
                    " --report-out acc_r2.csv --normalized-out acc_n2.csv") ==
            0;
    evl_ok = evl_ok && slurp("acc_r1.csv") == slurp("acc_r2.csv") &&
             slurp("acc_n1.csv") == slurp("acc_n2.csv");

    cleanup({"acc_cfg.json", "acc_g1.jsonl", "acc_g2.jsonl", "acc_g3.jsonl",
             "acc_m1.ckpt", "acc_m2.ckpt", "acc_l1.csv", "acc_l2.csv",
             "acc_r1.csv", "acc_r2.csv", "acc_n1.csv", "acc_n2.csv"});
    std::ostringstream ss;
    ss << "generate " << (gen_ok ? "byte-identical" : "MISMATCH") << ", train "
       << (trn_ok ? "byte-identical" : "MISMATCH") << ", evaluate "
       << (evl_ok ? "byte-identical" : "MISMATCH");
    detail = ss.str();
    return gen_ok && trn_ok && evl_ok;
#endif
}

} // namespace

int main() {
    run(1, "chunkwise recurrence matches sequential", c1_recurrence);
    run(2, "analytic gradients match finite differences", c2_gradients);
    run(3, "householder transition algebra", c3_householder);
    run(4, "default parameter count near 34.69M", c4_param_count);
    run(5, "OU stationary moments and ODE limit", c5_ou);
    run(6, "fBm variance scaling and H=0.5 whiteness", c6_fbm);
    run(7, "regime chain stay frequencies", c7_regime);
    run(8, "GP gram identities and path covariance", c8_gp);
    run(9, "augmentation contracts and category frequencies", c9_augment);
    run(10, "metric oracles", c10_metrics);
    run(11, "context/horizon structure sampling", c11_structure);
    run(12, "end-to-end toy training beats seasonal naive", c12_toy_learning);
    run(13, "missing-data robustness sweep", c13_nan_sweep);
    run(14, "CLI determinism across runs and workers", c14_determinism);
    std::printf("%s: %d/14 criteria passed\n",
                g_failures == 0 ? "OK" : "FAILURES", 14 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
