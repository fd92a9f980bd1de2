#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"
#include "nn/model.hpp"

namespace tempo::train {

enum class ShortenMode { Cut, Subsample };

struct NanAugConfig {
    double prob = 0.3; // chance a slot receives missing-value injection
    double point_rate = 0.05;
    double block_rate = 0.01;
    double block_mean_len = 5.0;
};

struct TrainConfig {
    double peak_lr = 2e-4;
    double min_lr_ratio = 0.01;
    double warmup_ratio = 0.003;
    double beta1 = 0.9;
    double beta2 = 0.98;
    double weight_decay = 0.01;
    double adam_eps = 1e-6;
    double grad_clip = 100.0;
    int iterations = 100;
    int batch_size = 8;
    int accumulation = 1;
    std::vector<std::pair<size_t, double>> length_distribution = {
        {128, 0.05}, {256, 0.10},  {512, 0.10},
        {1024, 0.10}, {1536, 0.15}, {2048, 0.50}};
    double cut_vs_subsample = 0.5; // probability of cut
    size_t horizon_min = 1;
    size_t horizon_max = 900;
    double scaler_aug_prob = 0.5;
    NanAugConfig nan_aug;
    uint64_t seed = 0;

    void validate() const;
};

struct StructureSample {
    size_t total_len = 0;
    size_t history_len = 0;
    size_t horizon = 0;
    ShortenMode mode = ShortenMode::Cut;
};

// Dynamic per-sample context/horizon construction: total length from the
// weighted distribution, horizon uniform in range capped at total/2,
// shortening mode an even coin flip.
StructureSample sample_structure(Rng& rng, const TrainConfig& cfg);

// Random contiguous window of total_len values.
TimeSeries shorten_cut(const TimeSeries& ts, size_t total_len, Rng& rng);
// Stride decimation with random phase down to total_len values.
TimeSeries shorten_subsample(const TimeSeries& ts, size_t total_len, Rng& rng);

struct BatchSource {
    std::string name;
    double weight = 1.0;
    std::function<TimeSeries(Rng&)> draw;
};

struct ComposedBatch {
    nn::TokenBatch batch;
    std::vector<std::string> provenance; // per slot
};

ComposedBatch compose_batch(const std::vector<BatchSource>& sources, Rng& rng,
                            const TrainConfig& cfg);

// Mean pinball loss over valid (sequence, step, quantile) entries.
// preds: one horizon x |Q| matrix per sequence. Empty masks mean all valid.
// Throws when no entry is valid.
double quantile_loss(const std::vector<nn::Mat>& preds,
                     const std::vector<std::vector<double>>& targets,
                     const std::vector<double>& quantiles,
                     const std::vector<std::vector<bool>>& masks = {});

// Linear warmup to peak over warmup_ratio * total steps, then cosine decay
// to min_lr_ratio * peak at step == total_steps.
double lr_at(int step, int total_steps, const TrainConfig& cfg);

// Scales all gradients so the global l2 norm does not exceed max_norm;
// returns the pre-clip norm.
double clip_gradients(nn::Model& model, double max_norm);

struct OptimizerState {
    int64_t step = 0;
    std::vector<nn::Mat> m, v;

    static OptimizerState init(const nn::Model& model);
};

// Norm gains, biases, the NaN embedding and initial states skip weight decay.
bool decay_excluded(const std::string& name);

void adamw_step(nn::Model& model, OptimizerState& state, double lr,
                const TrainConfig& cfg);

void save_optimizer(const OptimizerState& state, const std::string& path);
OptimizerState load_optimizer(const std::string& path);

struct TrainOptions {
    std::string checkpoint_path;  // model checkpoint, written at the end and
                                  // every checkpoint_every steps
    std::string optimizer_path;   // optional optimizer state alongside
    std::string loss_csv_path;    // step, lr, loss (appended when resuming)
    int checkpoint_every = 0;
    int start_step = 0;
    int stop_step = 0; // 0 = run to cfg.iterations; the lr schedule always
                       // spans cfg.iterations
};

// Runs iterations - start_step optimizer steps; per-step batches derive
// from (seed, step) so an interrupted run resumed from checkpoints
// reproduces the uninterrupted loss trace. Returns per-step losses.
std::vector<double> train(nn::Model& model, OptimizerState& state,
                          const std::vector<BatchSource>& sources,
                          const TrainConfig& cfg, const TrainOptions& opts);

} // namespace tempo::train
