#include "nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "nn/recurrence.hpp"

namespace tempo::nn {

void ModelConfig::validate() const {
    if (embed_dim <= 0 || layers <= 0 || heads <= 0 || mlp_hidden <= 0)
        throw std::invalid_argument("ModelConfig: dimensions must be positive");
    if (embed_dim % heads != 0)
        throw std::invalid_argument("ModelConfig: embed_dim not divisible by heads");
    if (householders < 1)
        throw std::invalid_argument("ModelConfig: householders must be >= 1");
    if (conv_kernel < 1 || conv_kernel > 32)
        throw std::invalid_argument("ModelConfig: conv_kernel out of [1, 32]");
    if (quantiles.empty())
        throw std::invalid_argument("ModelConfig: quantiles empty");
    for (size_t i = 0; i < quantiles.size(); ++i) {
        if (quantiles[i] <= 0.0 || quantiles[i] >= 1.0)
            throw std::invalid_argument("ModelConfig: quantile out of (0,1)");
        if (i > 0 && quantiles[i] <= quantiles[i - 1])
            throw std::invalid_argument("ModelConfig: quantiles not increasing");
    }
}

ModelConfig ModelConfig::toy() {
    ModelConfig c;
    c.embed_dim = 32;
    c.layers = 2;
    c.heads = 2;
    c.householders = 2;
    c.conv_kernel = 4;
    c.mlp_hidden = 48;
    return c;
}

namespace {

Mat randn(Rng& rng, int rows, int cols, double std) {
    Mat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = std * rng.normal();
    return m;
}

} // namespace

Model Model::init(const ModelConfig& config, Rng& rng) {
    config.validate();
    Model m;
    m.config = config;
    const int d = config.embed_dim;
    const int dh = config.head_dim();
    const int nh = config.householders;
    const int H = config.heads;
    const int ck = config.conv_kernel;
    const int F = config.time_features;
    const int nq = int(config.quantiles.size());

    auto add = [&](const std::string& name, Mat value) {
        m.tensors.push_back({name, std::move(value), {}});
    };

    add("embed.value", randn(rng, d, 1, 1.0));
    add("embed.nan", randn(rng, d, 1, 0.02));
    add("embed.time", randn(rng, d, F, 1.0 / std::sqrt(double(F))));

    const double ws = 1.0 / std::sqrt(double(d));
    for (int l = 0; l < config.layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        add(p + "norm1", Mat::Ones(d, 1));
        add(p + "norm2", Mat::Ones(d, 1));
        add(p + "wq", randn(rng, d, d, ws));
        for (int j = 0; j < nh; ++j) {
            add(p + "wk" + std::to_string(j), randn(rng, d, d, ws));
            add(p + "wv" + std::to_string(j), randn(rng, d, d, ws));
        }
        add(p + "wu", randn(rng, H * nh, d, ws));
        add(p + "wg", randn(rng, H, d, ws));
        add(p + "bg", Mat::Zero(H, 1));
        add(p + "wo", randn(rng, d, d, ws));
        // conv kernels start near the identity tap
        auto conv_init = [&]() {
            Mat k = randn(rng, d, ck, 0.02);
            k.col(ck - 1).array() += 1.0;
            return k;
        };
        add(p + "conv.q", conv_init());
        for (int j = 0; j < nh; ++j) {
            add(p + "conv.k" + std::to_string(j), conv_init());
            add(p + "conv.v" + std::to_string(j), conv_init());
        }
        add(p + "h0", Mat::Zero(H * dh, dh));
        add(p + "mlp.w1", randn(rng, config.mlp_hidden, d, ws));
        add(p + "mlp.w2", randn(rng, config.mlp_hidden, d, ws));
        add(p + "mlp.wo",
            randn(rng, d, config.mlp_hidden, 1.0 / std::sqrt(double(config.mlp_hidden))));
    }
    add("head.w", randn(rng, nq, d, ws));
    add("head.b", Mat::Zero(nq, 1));
    return m;
}

Tensor& Model::find(const std::string& name) {
    for (auto& t : tensors)
        if (t.name == name) return t;
    throw std::invalid_argument("Model: no tensor named " + name);
}

const Tensor& Model::find(const std::string& name) const {
    return const_cast<Model*>(this)->find(name);
}

size_t Model::param_count() const {
    size_t n = 0;
    for (const auto& t : tensors) n += size_t(t.value.size());
    return n;
}

void Model::zero_grads() {
    for (auto& t : tensors) t.grad = Mat::Zero(t.value.rows(), t.value.cols());
}

size_t TokenBatch::max_tokens() const {
    size_t m = 0;
    for (const auto& s : seqs) m = std::max(m, s.tokens());
    return m;
}

void TokenBatch::validate(int time_features) const {
    if (seqs.empty()) throw std::invalid_argument("TokenBatch: empty");
    for (const auto& s : seqs) {
        if (s.mask.size() != s.values.size())
            throw std::invalid_argument("TokenBatch: mask/value size mismatch");
        if (s.feats.rows != s.tokens())
            throw std::invalid_argument("TokenBatch: feature rows != tokens");
        if (int(s.feats.cols) > time_features)
            throw std::invalid_argument("TokenBatch: too many time feature columns");
        if (!s.target.empty() && s.target.size() != s.horizon)
            throw std::invalid_argument("TokenBatch: target size != horizon");
    }
}

// ------------------------------------------------------------- forward

namespace {

struct BuildContext {
    std::unordered_map<std::string, int> leaf;
    std::vector<bool> valid;
    int B = 0, T = 0, N = 0;
    int pred = -1;        // |Q| x N
    int final_embed = -1; // d x N
};

// feature value for column t of sequence s, zero-padded to F columns
double feat_at(const SeqData& s, size_t t, int f) {
    return f < int(s.feats.cols) ? s.feats.at(t, size_t(f)) : 0.0;
}

int embed_node(Tape& tape, const Model& model, const TokenBatch& batch,
               BuildContext& ctx) {
    const int d = model.config.embed_dim;
    const int F = model.config.time_features;
    const int ev = ctx.leaf.at("embed.value");
    const int en = ctx.leaf.at("embed.nan");
    const int et = ctx.leaf.at("embed.time");
    const Mat& wv = tape.val(ev);
    const Mat& nanv = tape.val(en);
    const Mat& wt = tape.val(et);

    Mat X = Mat::Zero(d, ctx.N);
    for (int b = 0; b < ctx.B; ++b) {
        const SeqData& s = batch.seqs[size_t(b)];
        for (size_t t = 0; t < s.tokens(); ++t) {
            const int col = b * ctx.T + int(t);
            Eigen::VectorXd f(F);
            for (int k = 0; k < F; ++k) f(k) = feat_at(s, t, k);
            X.col(col) = wt * f;
            if (t < s.history()) {
                if (s.mask[t])
                    X.col(col) += wv.col(0) * s.values[t];
                else
                    X.col(col) += nanv.col(0);
            }
        }
    }
    const int id = int(tape.size());
    if (!tape.recording) return tape.custom(std::move(X), {});
    auto back = [&tape, &batch, id, ev, en, et, F, B = ctx.B, T = ctx.T] {
        const Mat& g = tape.grad(id);
        Mat& gv = tape.grad(ev);
        Mat& gn = tape.grad(en);
        Mat& gt = tape.grad(et);
        for (int b = 0; b < B; ++b) {
            const SeqData& s = batch.seqs[size_t(b)];
            for (size_t t = 0; t < s.tokens(); ++t) {
                const int col = b * T + int(t);
                Eigen::VectorXd f(F);
                for (int k = 0; k < F; ++k) f(k) = feat_at(s, t, k);
                gt += g.col(col) * f.transpose();
                if (t < s.history()) {
                    if (s.mask[t])
                        gv.col(0) += g.col(col) * s.values[t];
                    else
                        gn.col(0) += g.col(col);
                }
            }
        }
    };
    return tape.custom(std::move(X), std::move(back));
}

struct RecCtx {
    RecurrenceDims dims;
    std::vector<Mat> saved;
    Mat grad_hfinal;
};

// returns the output node id; hf_out receives the final-state node id
int recurrence_node(Tape& tape, const RecurrenceDims& dims, int q,
                    const std::vector<int>& ks, const std::vector<int>& vs,
                    int beta, int alpha, int h0, const std::vector<bool>& valid,
                    int& hf_out) {
    auto ctx = std::make_shared<RecCtx>();
    ctx->dims = dims;

    std::vector<Mat> kv, vv;
    for (int id : ks) kv.push_back(tape.val(id));
    for (int id : vs) vv.push_back(tape.val(id));

    Mat out, hfinal;
    recurrence_sequential<double>(dims, tape.val(q), kv, vv, tape.val(beta),
                                  tape.val(alpha), tape.val(h0), valid, out,
                                  hfinal, tape.recording ? &ctx->saved : nullptr);

    const int o_id = int(tape.size());
    std::function<void()> o_back;
    if (tape.recording) {
        o_back = [&tape, ctx, o_id, q, ks, vs, beta, alpha, h0, valid] {
            const Mat& go = tape.grad(o_id);
            Mat ghf = ctx->grad_hfinal;
            if (ghf.size() == 0)
                ghf = Mat::Zero(tape.val(h0).rows(), tape.val(h0).cols());
            std::vector<Mat> kv2, vv2;
            for (int id : ks) kv2.push_back(tape.val(id));
            for (int id : vs) vv2.push_back(tape.val(id));
            std::vector<Mat> gk(kv2.size()), gv(vv2.size());
            for (size_t j = 0; j < gk.size(); ++j) {
                gk[j] = Mat::Zero(kv2[j].rows(), kv2[j].cols());
                gv[j] = Mat::Zero(vv2[j].rows(), vv2[j].cols());
            }
            Mat gq = Mat::Zero(tape.val(q).rows(), tape.val(q).cols());
            Mat gb = Mat::Zero(tape.val(beta).rows(), tape.val(beta).cols());
            Mat ga = Mat::Zero(tape.val(alpha).rows(), tape.val(alpha).cols());
            Mat gh0 = Mat::Zero(tape.val(h0).rows(), tape.val(h0).cols());
            recurrence_backward(ctx->dims, tape.val(q), kv2, vv2, tape.val(beta),
                                tape.val(alpha), ctx->saved, valid, go, ghf, gq,
                                gk, gv, gb, ga, gh0);
            tape.grad(q) += gq;
            for (size_t j = 0; j < gk.size(); ++j) {
                tape.grad(ks[j]) += gk[j];
                tape.grad(vs[j]) += gv[j];
            }
            tape.grad(beta) += gb;
            tape.grad(alpha) += ga;
            tape.grad(h0) += gh0;
        };
    }
    const int o_final = tape.custom(std::move(out), std::move(o_back));

    std::function<void()> hf_back;
    if (tape.recording) {
        const int hf_id = int(tape.size()); // the node we are about to create
        hf_back = [&tape, ctx, hf_id] { ctx->grad_hfinal = tape.grad(hf_id); };
    }
    hf_out = tape.custom(std::move(hfinal), std::move(hf_back));
    return o_final;
}

int pinball_node(Tape& tape, int pred, const TokenBatch& batch,
                 const std::vector<double>& quantiles, int B, int T) {
    // count valid target entries
    size_t count = 0;
    for (const auto& s : batch.seqs)
        for (size_t k = 0; k < s.horizon; ++k)
            if (k < s.target.size() && (s.target_mask.empty() || s.target_mask[k]))
                ++count;
    const size_t nq = quantiles.size();
    if (count == 0) {
        Mat z = Mat::Zero(1, 1);
        return tape.custom(std::move(z), {});
    }
    const double norm = 1.0 / (double(count) * double(nq));

    const Mat& P = tape.val(pred);
    double loss = 0.0;
    for (int b = 0; b < B; ++b) {
        const SeqData& s = batch.seqs[size_t(b)];
        for (size_t k = 0; k < s.horizon; ++k) {
            if (k >= s.target.size()) continue;
            if (!s.target_mask.empty() && !s.target_mask[k]) continue;
            const int col = b * T + int(s.history() + k);
            for (size_t iq = 0; iq < nq; ++iq) {
                const double e = s.target[k] - P(int(iq), col);
                loss += std::max(quantiles[iq] * e, (quantiles[iq] - 1.0) * e);
            }
        }
    }
    Mat lv(1, 1);
    lv(0, 0) = loss * norm;
    const int id = int(tape.size());
    if (!tape.recording) return tape.custom(std::move(lv), {});
    auto back = [&tape, &batch, id, pred, quantiles, norm, B, T] {
        const double gl = tape.grad(id)(0, 0);
        const Mat& P2 = tape.val(pred);
        Mat& gp = tape.grad(pred);
        for (int b = 0; b < B; ++b) {
            const SeqData& s = batch.seqs[size_t(b)];
            for (size_t k = 0; k < s.horizon; ++k) {
                if (k >= s.target.size()) continue;
                if (!s.target_mask.empty() && !s.target_mask[k]) continue;
                const int col = b * T + int(s.history() + k);
                for (size_t iq = 0; iq < quantiles.size(); ++iq) {
                    const double e = s.target[k] - P2(int(iq), col);
                    // d rho / d e, q branch at e == 0
                    const double de = e >= 0.0 ? quantiles[iq] : quantiles[iq] - 1.0;
                    gp(int(iq), col) += -de * norm * gl;
                }
            }
        }
    };
    return tape.custom(std::move(lv), std::move(back));
}

void build_forward(Tape& tape, const Model& model, const TokenBatch& batch,
                   BuildContext& ctx) {
    model.config.validate();
    batch.validate(model.config.time_features);
    const int d = model.config.embed_dim;
    const int dh = model.config.head_dim();
    const int nh = model.config.householders;
    ctx.B = int(batch.seqs.size());
    ctx.T = int(batch.max_tokens());
    ctx.N = ctx.B * ctx.T;

    ctx.valid.assign(size_t(ctx.N), false);
    for (int b = 0; b < ctx.B; ++b)
        for (size_t t = 0; t < batch.seqs[size_t(b)].tokens(); ++t)
            ctx.valid[size_t(b * ctx.T + int(t))] = true;

    for (const auto& t : model.tensors) ctx.leaf[t.name] = tape.leaf(t.value);

    int x = embed_node(tape, model, batch, ctx);

    int prev_hf = -1;
    for (int l = 0; l < model.config.layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        auto id = [&](const std::string& n) { return ctx.leaf.at(p + n); };

        const int y = tape.rmsnorm(x, id("norm1"));
        const int q = tape.silu(
            tape.causal_conv(tape.matmul(id("wq"), y), id("conv.q"), ctx.T));
        std::vector<int> ks, vs;
        for (int j = 0; j < nh; ++j) {
            const std::string js = std::to_string(j);
            ks.push_back(tape.l2norm_blocks(
                tape.silu(tape.causal_conv(tape.matmul(id("wk" + js), y),
                                           id("conv.k" + js), ctx.T)),
                dh));
            vs.push_back(tape.silu(tape.causal_conv(tape.matmul(id("wv" + js), y),
                                                    id("conv.v" + js), ctx.T)));
        }
        int beta = tape.sigmoid(tape.matmul(id("wu"), y));
        if (model.config.allow_negative_eigenvalues) beta = tape.scale(beta, 2.0);
        const int alpha =
            tape.exp_neg_softplus(tape.add_col(tape.matmul(id("wg"), y), id("bg")));

        int h0 = tape.tile_cols(id("h0"), ctx.B);
        if (model.config.state_weaving && prev_hf >= 0) h0 = tape.add(h0, prev_hf);

        RecurrenceDims dims;
        dims.heads = model.config.heads;
        dims.head_dim = dh;
        dims.n_h = nh;
        dims.batch = ctx.B;
        dims.seq_len = ctx.T;
        int hf = -1;
        const int o =
            recurrence_node(tape, dims, q, ks, vs, beta, alpha, h0, ctx.valid, hf);
        prev_hf = hf;

        x = tape.add(x, tape.matmul(id("wo"), o));
        const int u = tape.rmsnorm(x, id("norm2"));
        const int m =
            tape.cmul(tape.silu(tape.matmul(id("mlp.w1"), u)), tape.matmul(id("mlp.w2"), u));
        x = tape.add(x, tape.matmul(id("mlp.wo"), m));
    }
    ctx.final_embed = x;
    ctx.pred = tape.add_col(tape.matmul(ctx.leaf.at("head.w"), x), ctx.leaf.at("head.b"));
    (void)d;
}

} // namespace

Mat embed_tokens(const Model& model, const TokenBatch& batch) {
    Tape tape;
    tape.recording = false;
    BuildContext ctx;
    batch.validate(model.config.time_features);
    ctx.B = int(batch.seqs.size());
    ctx.T = int(batch.max_tokens());
    ctx.N = ctx.B * ctx.T;
    for (const auto& t : model.tensors) ctx.leaf[t.name] = tape.leaf(t.value);
    return tape.val(embed_node(tape, model, batch, ctx));
}

std::vector<Forecast> forward(const Model& model, const TokenBatch& batch) {
    Tape tape;
    tape.recording = false;
    BuildContext ctx;
    build_forward(tape, model, batch, ctx);
    const Mat& P = tape.val(ctx.pred);
    const size_t nq = model.config.quantiles.size();

    std::vector<Forecast> out;
    for (size_t b = 0; b < batch.seqs.size(); ++b) {
        const SeqData& s = batch.seqs[b];
        Forecast f;
        f.quantiles = Mat(Eigen::Index(s.horizon), Eigen::Index(nq));
        for (size_t k = 0; k < s.horizon; ++k) {
            const int col = int(b) * ctx.T + int(s.history() + k);
            std::vector<double> row(nq);
            for (size_t iq = 0; iq < nq; ++iq)
                row[iq] = s.scaler.invert(P(int(iq), col));
            if (!std::is_sorted(row.begin(), row.end())) {
                std::sort(row.begin(), row.end());
                ++f.crossing_rows;
            }
            for (size_t iq = 0; iq < nq; ++iq)
                f.quantiles(Eigen::Index(k), Eigen::Index(iq)) = row[iq];
        }
        out.push_back(std::move(f));
    }
    return out;
}

double loss_value(const Model& model, const TokenBatch& batch) {
    Tape tape;
    tape.recording = false;
    BuildContext ctx;
    build_forward(tape, model, batch, ctx);
    const int loss =
        pinball_node(tape, ctx.pred, batch, model.config.quantiles, ctx.B, ctx.T);
    return tape.val(loss)(0, 0);
}

double loss_and_gradients(Model& model, const TokenBatch& batch, double loss_scale) {
    Tape tape;
    BuildContext ctx;
    build_forward(tape, model, batch, ctx);
    int loss = pinball_node(tape, ctx.pred, batch, model.config.quantiles, ctx.B, ctx.T);
    if (loss_scale != 1.0) loss = tape.scale(loss, loss_scale);
    tape.backward(loss);

    model.zero_grads();
    for (auto& t : model.tensors) {
        const int id = ctx.leaf.at(t.name);
        Mat& g = tape.grad(id);
        if (g.size() != 0) t.grad = g;
        if (!t.grad.allFinite())
            throw std::runtime_error("loss_and_gradients: non-finite gradient in " +
                                     t.name);
    }
    return tape.val(loss)(0, 0);
}

// ------------------------------------------------------------ checkpoint

namespace {

template <typename T>
void write_pod(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T read_pod(std::ifstream& f) {
    T v{};
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

} // namespace

void save_checkpoint(const Model& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    f.write("TPCK", 4);
    write_pod<uint16_t>(f, 1);
    const ModelConfig& c = model.config;
    for (int v : {c.embed_dim, c.layers, c.heads, c.householders, c.conv_kernel,
                  c.mlp_hidden, c.time_features})
        write_pod<int32_t>(f, v);
    write_pod<uint8_t>(f, c.allow_negative_eigenvalues ? 1 : 0);
    write_pod<uint8_t>(f, c.state_weaving ? 1 : 0);
    write_pod<uint32_t>(f, uint32_t(c.quantiles.size()));
    for (double q : c.quantiles) write_pod<double>(f, q);

    write_pod<uint32_t>(f, uint32_t(model.tensors.size()));
    for (const auto& t : model.tensors) {
        write_pod<uint16_t>(f, uint16_t(t.name.size()));
        f.write(t.name.data(), std::streamsize(t.name.size()));
        write_pod<uint32_t>(f, uint32_t(t.value.rows()));
        write_pod<uint32_t>(f, uint32_t(t.value.cols()));
        for (Eigen::Index c2 = 0; c2 < t.value.cols(); ++c2)
            for (Eigen::Index r = 0; r < t.value.rows(); ++r)
                write_pod<float>(f, float(t.value(r, c2)));
    }
}

Model load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "TPCK", 4) != 0)
        throw std::runtime_error("checkpoint: bad magic");
    if (read_pod<uint16_t>(f) != 1)
        throw std::runtime_error("checkpoint: unsupported version");
    Model m;
    ModelConfig& c = m.config;
    c.embed_dim = read_pod<int32_t>(f);
    c.layers = read_pod<int32_t>(f);
    c.heads = read_pod<int32_t>(f);
    c.householders = read_pod<int32_t>(f);
    c.conv_kernel = read_pod<int32_t>(f);
    c.mlp_hidden = read_pod<int32_t>(f);
    c.time_features = read_pod<int32_t>(f);
    c.allow_negative_eigenvalues = read_pod<uint8_t>(f) != 0;
    c.state_weaving = read_pod<uint8_t>(f) != 0;
    const uint32_t nq = read_pod<uint32_t>(f);
    c.quantiles.clear();
    for (uint32_t i = 0; i < nq; ++i) c.quantiles.push_back(read_pod<double>(f));

    const uint32_t nt = read_pod<uint32_t>(f);
    for (uint32_t i = 0; i < nt; ++i) {
        const uint16_t nl = read_pod<uint16_t>(f);
        std::string name(nl, '\0');
        f.read(name.data(), nl);
        const uint32_t rows = read_pod<uint32_t>(f);
        const uint32_t cols = read_pod<uint32_t>(f);
        Mat v(rows, cols);
        for (uint32_t c2 = 0; c2 < cols; ++c2)
            for (uint32_t r = 0; r < rows; ++r)
                v(r, c2) = double(read_pod<float>(f));
        if (!f) throw std::runtime_error("checkpoint: truncated tensor " + name);
        m.tensors.push_back({std::move(name), std::move(v), {}});
    }
    m.config.validate();
    return m;
}

} // namespace tempo::nn
