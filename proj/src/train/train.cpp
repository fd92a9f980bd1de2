#include "train/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "aug/augment.hpp"
#include "core/scaler.hpp"
#include "core/time_features.hpp"

namespace tempo::train {

void TrainConfig::validate() const {
    if (peak_lr <= 0.0 || iterations < 0 || batch_size < 1 || accumulation < 1)
        throw std::invalid_argument("TrainConfig: bad optimizer settings");
    if (length_distribution.empty())
        throw std::invalid_argument("TrainConfig: empty length distribution");
    double total = 0.0;
    for (const auto& [len, p] : length_distribution) {
        if (len < 2 || p < 0.0)
            throw std::invalid_argument("TrainConfig: bad length entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("TrainConfig: length weights must sum to 1");
    if (horizon_min < 1 || horizon_max < horizon_min)
        throw std::invalid_argument("TrainConfig: bad horizon range");
    if (warmup_ratio < 0.0 || warmup_ratio >= 1.0 || min_lr_ratio < 0.0)
        throw std::invalid_argument("TrainConfig: bad schedule settings");
}

StructureSample sample_structure(Rng& rng, const TrainConfig& cfg) {
    StructureSample s;
    std::vector<double> weights;
    for (const auto& [len, p] : cfg.length_distribution) weights.push_back(p);
    s.total_len = cfg.length_distribution[rng.weighted_index(weights)].first;
    s.mode = rng.uniform() < cfg.cut_vs_subsample ? ShortenMode::Cut
                                                  : ShortenMode::Subsample;
    const size_t cap = std::max<size_t>(1, s.total_len / 2);
    const size_t hi = std::min(cfg.horizon_max, cap);
    const size_t lo = std::min(cfg.horizon_min, hi);
    s.horizon = size_t(rng.uniform_int(int64_t(lo), int64_t(hi)));
    s.history_len = s.total_len - s.horizon;
    return s;
}

TimeSeries shorten_cut(const TimeSeries& ts, size_t total_len, Rng& rng) {
    if (ts.size() <= total_len) return ts;
    const size_t start =
        size_t(rng.uniform_int(0, int64_t(ts.size() - total_len)));
    TimeSeries out = ts;
    out.values.assign(ts.values.begin() + long(start),
                      ts.values.begin() + long(start + total_len));
    out.mask.assign(ts.mask.begin() + long(start),
                    ts.mask.begin() + long(start + total_len));
    return out;
}

TimeSeries shorten_subsample(const TimeSeries& ts, size_t total_len, Rng& rng) {
    if (ts.size() <= total_len) return ts;
    const size_t stride = ts.size() / total_len;
    const size_t span = ts.size() - stride * (total_len - 1);
    const size_t phase = size_t(rng.uniform_int(0, int64_t(span) - 1));
    TimeSeries out = ts;
    out.values.clear();
    out.mask.clear();
    for (size_t i = 0; i < total_len; ++i) {
        out.values.push_back(ts.values[phase + i * stride]);
        out.mask.push_back(ts.mask[phase + i * stride]);
    }
    return out;
}

ComposedBatch compose_batch(const std::vector<BatchSource>& sources, Rng& rng,
                            const TrainConfig& cfg) {
    if (sources.empty())
        throw std::invalid_argument("compose_batch: no sources");
    cfg.validate();
    std::vector<double> weights;
    for (const auto& s : sources) weights.push_back(s.weight);

    ComposedBatch out;
    for (int slot = 0; slot < cfg.batch_size; ++slot) {
        const BatchSource& src = sources[rng.weighted_index(weights)];
        TimeSeries ts = src.draw(rng);
        if (ts.size() < 2)
            throw std::runtime_error("compose_batch: source series too short");

        StructureSample st = sample_structure(rng, cfg);
        if (ts.size() > st.total_len) {
            ts = st.mode == ShortenMode::Cut
                     ? shorten_cut(ts, st.total_len, rng)
                     : shorten_subsample(ts, st.total_len, rng);
        } else {
            st.total_len = ts.size();
            st.horizon = std::min(st.horizon, std::max<size_t>(1, st.total_len / 2));
            st.history_len = st.total_len - st.horizon;
        }

        // main robust scaler, or an alternative with scaler_aug_prob
        ScalerKind kind = ScalerKind::Robust;
        if (rng.bernoulli(cfg.scaler_aug_prob)) {
            const ScalerKind alts[] = {ScalerKind::MinMax, ScalerKind::Median,
                                       ScalerKind::Mean};
            kind = alts[rng.uniform_int(0, 2)];
        }
        std::vector<double> hist_obs;
        for (size_t t = 0; t < st.history_len; ++t)
            if (ts.mask[t]) hist_obs.push_back(ts.values[t]);
        Scaler scaler = hist_obs.empty() ? Scaler{ScalerKind::Robust, 0.0, 1.0}
                                         : fit_scaler(kind, hist_obs);

        // inject missing data into the history region only
        if (rng.bernoulli(cfg.nan_aug.prob))
            ts = aug::nan_inject(ts, rng, cfg.nan_aug.point_rate,
                                 cfg.nan_aug.block_rate,
                                 cfg.nan_aug.block_mean_len, st.history_len);

        nn::SeqData sd;
        for (size_t t = 0; t < st.history_len; ++t) {
            sd.values.push_back(scaler.apply(ts.values[t]));
            sd.mask.push_back(ts.mask[t]);
        }
        sd.horizon = st.horizon;
        sd.feats = time_features(ts.start, ts.freq, st.history_len, st.horizon);
        sd.scaler = scaler;
        for (size_t k = 0; k < st.horizon; ++k) {
            sd.target.push_back(scaler.apply(ts.values[st.history_len + k]));
            sd.target_mask.push_back(ts.mask[st.history_len + k]);
        }
        out.batch.seqs.push_back(std::move(sd));
        out.provenance.push_back(src.name + ":" + ts.provenance);
    }
    return out;
}

double quantile_loss(const std::vector<nn::Mat>& preds,
                     const std::vector<std::vector<double>>& targets,
                     const std::vector<double>& quantiles,
                     const std::vector<std::vector<bool>>& masks) {
    if (preds.size() != targets.size())
        throw std::invalid_argument("quantile_loss: size mismatch");
    double sum = 0.0;
    size_t count = 0;
    for (size_t s = 0; s < preds.size(); ++s) {
        if (preds[s].rows() != Eigen::Index(targets[s].size()) ||
            preds[s].cols() != Eigen::Index(quantiles.size()))
            throw std::invalid_argument("quantile_loss: shape mismatch");
        for (size_t k = 0; k < targets[s].size(); ++k) {
            if (s < masks.size() && !masks[s].empty() && !masks[s][k]) continue;
            for (size_t iq = 0; iq < quantiles.size(); ++iq) {
                const double e =
                    targets[s][k] - preds[s](Eigen::Index(k), Eigen::Index(iq));
                sum += std::max(quantiles[iq] * e, (quantiles[iq] - 1.0) * e);
                ++count;
            }
        }
    }
    if (count == 0) throw std::invalid_argument("quantile_loss: no valid entries");
    return sum / double(count);
}

double lr_at(int step, int total_steps, const TrainConfig& cfg) {
    if (step < 0 || step > total_steps)
        throw std::invalid_argument("lr_at: step out of range");
    const int warmup =
        std::max(1, int(std::lround(cfg.warmup_ratio * double(total_steps))));
    if (step <= warmup) return cfg.peak_lr * double(step) / double(warmup);
    const double lo = cfg.min_lr_ratio * cfg.peak_lr;
    const double frac = double(step - warmup) / double(total_steps - warmup);
    return lo + (cfg.peak_lr - lo) * 0.5 *
                    (1.0 + std::cos(std::numbers::pi * frac));
}

double clip_gradients(nn::Model& model, double max_norm) {
    double sq = 0.0;
    for (const auto& t : model.tensors) sq += t.grad.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (auto& t : model.tensors) t.grad *= s;
    }
    return norm;
}

OptimizerState OptimizerState::init(const nn::Model& model) {
    OptimizerState st;
    for (const auto& t : model.tensors) {
        st.m.push_back(nn::Mat::Zero(t.value.rows(), t.value.cols()));
        st.v.push_back(nn::Mat::Zero(t.value.rows(), t.value.cols()));
    }
    return st;
}

bool decay_excluded(const std::string& name) {
    auto ends_with = [&](const std::string& suffix) {
        return name.size() >= suffix.size() &&
               name.compare(name.size() - suffix.size(), suffix.size(),
                            suffix) == 0;
    };
    return name.find(".norm") != std::string::npos || name == "embed.nan" ||
           ends_with(".bg") || ends_with(".h0") || name == "head.b";
}

void adamw_step(nn::Model& model, OptimizerState& state, double lr,
                const TrainConfig& cfg) {
    if (state.m.size() != model.tensors.size())
        throw std::invalid_argument("adamw_step: state/model mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
    for (size_t i = 0; i < model.tensors.size(); ++i) {
        auto& t = model.tensors[i];
        if (t.grad.size() == 0) continue;
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * t.grad;
        state.v[i] = cfg.beta2 * state.v[i].array().matrix() +
                     (1.0 - cfg.beta2) * t.grad.cwiseProduct(t.grad);
        const nn::Mat mhat = state.m[i] / bc1;
        const nn::Mat vhat = state.v[i] / bc2;
        nn::Mat update =
            mhat.array() / (vhat.array().sqrt() + cfg.adam_eps);
        if (cfg.weight_decay > 0.0 && !decay_excluded(t.name))
            update += cfg.weight_decay * t.value;
        t.value -= lr * update;
        if (!t.value.allFinite())
            throw std::runtime_error("adamw_step: non-finite parameter in " +
                                     t.name);
    }
}

void save_optimizer(const OptimizerState& state, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("optimizer state: cannot open " + path);
    f.write("TPOP", 4);
    const int64_t step = state.step;
    f.write(reinterpret_cast<const char*>(&step), sizeof(step));
    const uint32_t n = uint32_t(state.m.size());
    f.write(reinterpret_cast<const char*>(&n), sizeof(n));
    auto dump = [&](const nn::Mat& m) {
        const uint32_t rows = uint32_t(m.rows()), cols = uint32_t(m.cols());
        f.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        f.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        f.write(reinterpret_cast<const char*>(m.data()),
                std::streamsize(sizeof(double)) * m.size());
    };
    for (uint32_t i = 0; i < n; ++i) {
        dump(state.m[i]);
        dump(state.v[i]);
    }
}

OptimizerState load_optimizer(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("optimizer state: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "TPOP")
        throw std::runtime_error("optimizer state: bad magic");
    OptimizerState st;
    f.read(reinterpret_cast<char*>(&st.step), sizeof(st.step));
    uint32_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof(n));
    auto slurp = [&]() {
        uint32_t rows = 0, cols = 0;
        f.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        f.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        nn::Mat m(rows, cols);
        f.read(reinterpret_cast<char*>(m.data()),
               std::streamsize(sizeof(double)) * m.size());
        if (!f) throw std::runtime_error("optimizer state: truncated file");
        return m;
    };
    for (uint32_t i = 0; i < n; ++i) {
        st.m.push_back(slurp());
        st.v.push_back(slurp());
    }
    return st;
}

std::vector<double> train(nn::Model& model, OptimizerState& state,
                          const std::vector<BatchSource>& sources,
                          const TrainConfig& cfg, const TrainOptions& opts) {
    cfg.validate();
    std::ofstream csv;
    if (!opts.loss_csv_path.empty()) {
        csv.open(opts.loss_csv_path,
                 opts.start_step > 0 ? std::ios::app : std::ios::trunc);
        if (!csv) throw std::runtime_error("train: cannot open loss csv");
        if (opts.start_step == 0) csv << "step,lr,loss\n";
    }
    auto checkpoint = [&] {
        if (!opts.checkpoint_path.empty())
            nn::save_checkpoint(model, opts.checkpoint_path);
        if (!opts.optimizer_path.empty())
            save_optimizer(state, opts.optimizer_path);
    };

    std::vector<double> losses;
    const double micro_scale = 1.0 / double(cfg.accumulation);
    const int stop = opts.stop_step > 0 ? std::min(opts.stop_step, cfg.iterations)
                                        : cfg.iterations;
    for (int step = opts.start_step; step < stop; ++step) {
        Rng rng(derive_seed(cfg.seed, 0x7472u, uint64_t(step)));
        std::vector<nn::Mat> acc;
        for (const auto& t : model.tensors)
            acc.push_back(nn::Mat::Zero(t.value.rows(), t.value.cols()));
        double step_loss = 0.0;
        for (int a = 0; a < cfg.accumulation; ++a) {
            ComposedBatch cb = compose_batch(sources, rng, cfg);
            double l;
            try {
                l = nn::loss_and_gradients(model, cb.batch, micro_scale);
            } catch (const std::exception& e) {
                std::string prov;
                for (const auto& p : cb.provenance) prov += " " + p;
                throw std::runtime_error("train: step " + std::to_string(step) +
                                         " failed (" + e.what() + ");" + prov);
            }
            if (!std::isfinite(l)) {
                std::string prov;
                for (const auto& p : cb.provenance) prov += " " + p;
                throw std::runtime_error("train: non-finite loss at step " +
                                         std::to_string(step) + ";" + prov);
            }
            step_loss += l;
            for (size_t i = 0; i < acc.size(); ++i)
                acc[i] += model.tensors[i].grad;
        }
        for (size_t i = 0; i < acc.size(); ++i)
            model.tensors[i].grad = std::move(acc[i]);
        clip_gradients(model, cfg.grad_clip);
        const double lr = lr_at(step + 1, cfg.iterations, cfg);
        adamw_step(model, state, lr, cfg);
        losses.push_back(step_loss);
        if (csv.is_open()) csv << step << "," << lr << "," << step_loss << "\n";
        if (opts.checkpoint_every > 0 && (step + 1) % opts.checkpoint_every == 0)
            checkpoint();
    }
    checkpoint();
    return losses;
}

} // namespace tempo::train
