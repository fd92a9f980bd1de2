#pragma once

#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/scaler.hpp"
#include "core/time_features.hpp"
#include "nn/tape.hpp"

namespace tempo::nn {

struct ModelConfig {
    int embed_dim = 512;
    int layers = 10;
    int heads = 4;
    int householders = 4; // n_h
    int conv_kernel = 16;
    int mlp_hidden = 448;
    int time_features = 6;
    bool allow_negative_eigenvalues = true;
    bool state_weaving = true;
    std::vector<double> quantiles = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

    int head_dim() const { return embed_dim / heads; }
    void validate() const;

    static ModelConfig toy();
};

struct Tensor {
    std::string name;
    Mat value;
    Mat grad;
};

struct Model {
    ModelConfig config;
    std::vector<Tensor> tensors;

    static Model init(const ModelConfig& config, Rng& rng);

    Tensor& find(const std::string& name);
    const Tensor& find(const std::string& name) const;
    size_t param_count() const;
    void zero_grads();
};

// One sequence of the token batch. Values are already in the scaled
// domain; `scaler` maps predictions back. Feature rows cover
// history + horizon positions.
struct SeqData {
    std::vector<double> values;    // history
    std::vector<bool> mask;        // history observed flags
    size_t horizon = 0;
    TimeFeatureMatrix feats;
    Scaler scaler;
    std::vector<double> target;      // horizon targets (training)
    std::vector<bool> target_mask;

    size_t history() const { return values.size(); }
    size_t tokens() const { return values.size() + horizon; }
};

struct TokenBatch {
    std::vector<SeqData> seqs;
    size_t max_tokens() const;
    void validate(int time_features) const;
};

struct Forecast {
    // horizon x |Q|, in the original (unscaled) domain, quantiles sorted
    Mat quantiles;
    size_t crossing_rows = 0; // rows the sort actually reordered
};

// Embedding matrix (embed_dim x batch*max_tokens), inference path; exposed
// for the embedding contract tests.
Mat embed_tokens(const Model& model, const TokenBatch& batch);

std::vector<Forecast> forward(const Model& model, const TokenBatch& batch);

// Mean pinball loss over valid target positions; fills tensor grads.
// loss_scale multiplies the loss (and so every gradient).
double loss_and_gradients(Model& model, const TokenBatch& batch,
                          double loss_scale = 1.0);
// Loss only, no gradient pass.
double loss_value(const Model& model, const TokenBatch& batch);

// Versioned binary checkpoint, tensors stored as named f32 arrays.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

} // namespace tempo::nn
