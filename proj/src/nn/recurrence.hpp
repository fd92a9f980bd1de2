#pragma once

#include <vector>

#include <Eigen/Dense>

namespace tempo::nn {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// H' = (I - beta k k^T) H + beta k v^T
template <typename S>
void householder_step(MatX<S>& H, const VecX<S>& k, const VecX<S>& v, S beta) {
    const VecX<S> ktH = H.transpose() * k; // value-dim row of k^T H
    H.noalias() -= beta * k * ktH.transpose();
    H.noalias() += beta * k * v.transpose();
}

// Layout conventions shared by both realizations:
//   d = heads * head_dim, N = batch * seq_len (right-padded)
//   q, keys[j], values[j]: d x N (keys already unit-normalized per head)
//   beta: (heads * n_h) x N, row h * n_h + j
//   alpha: heads x N
//   h0, h_final: (heads * head_dim) x (head_dim * batch)
//   valid: N flags; padded columns produce zero output and freeze the state
struct RecurrenceDims {
    int heads = 1;
    int head_dim = 1;
    int n_h = 1;
    int batch = 1;
    int seq_len = 1;
};

// Token-by-token evaluation. When `saved` is non-null it receives
// seq_len + 1 snapshots of the full state (index t = state before token t),
// which the gradient path replays.
template <typename S>
void recurrence_sequential(const RecurrenceDims& dims, const MatX<S>& q,
                           const std::vector<MatX<S>>& keys,
                           const std::vector<MatX<S>>& values,
                           const MatX<S>& beta, const MatX<S>& alpha,
                           const MatX<S>& h0, const std::vector<bool>& valid,
                           MatX<S>& out, MatX<S>& h_final,
                           std::vector<MatX<S>>* saved = nullptr) {
    const int dh = dims.head_dim;
    const int N = dims.batch * dims.seq_len;
    out = MatX<S>::Zero(dims.heads * dh, N);
    MatX<S> state = h0;
    if (saved) {
        saved->clear();
        saved->reserve(size_t(dims.seq_len) + 1);
        saved->push_back(state);
    }
    for (int t = 0; t < dims.seq_len; ++t) {
        for (int b = 0; b < dims.batch; ++b) {
            const int col = b * dims.seq_len + t;
            if (!valid[size_t(col)]) continue;
            for (int h = 0; h < dims.heads; ++h) {
                auto H = state.block(h * dh, b * dh, dh, dh);
                MatX<S> Hh = H;
                Hh *= alpha(h, col);
                for (int j = 0; j < dims.n_h; ++j) {
                    const VecX<S> k = keys[size_t(j)].col(col).segment(h * dh, dh);
                    const VecX<S> v = values[size_t(j)].col(col).segment(h * dh, dh);
                    householder_step<S>(Hh, k, v, beta(h * dims.n_h + j, col));
                }
                H = Hh;
                out.col(col).segment(h * dh, dh).noalias() =
                    Hh.transpose() * q.col(col).segment(h * dh, dh);
            }
        }
        if (saved) saved->push_back(state);
    }
    h_final = state;
}

// Chunk-parallel form: per token the transition is composed into a dense
// head_dim x head_dim matrix, chunks accumulate (prefix transition, input)
// pairs, and the state is carried between chunks. Same contract as the
// sequential path.
template <typename S>
void recurrence_chunkwise(const RecurrenceDims& dims, const MatX<S>& q,
                          const std::vector<MatX<S>>& keys,
                          const std::vector<MatX<S>>& values,
                          const MatX<S>& beta, const MatX<S>& alpha,
                          const MatX<S>& h0, const std::vector<bool>& valid,
                          int chunk_len, MatX<S>& out, MatX<S>& h_final) {
    const int dh = dims.head_dim;
    const int N = dims.batch * dims.seq_len;
    out = MatX<S>::Zero(dims.heads * dh, N);
    h_final = h0;
    const MatX<S> I = MatX<S>::Identity(dh, dh);
    for (int b = 0; b < dims.batch; ++b) {
        for (int h = 0; h < dims.heads; ++h) {
            MatX<S> carry = h0.block(h * dh, b * dh, dh, dh);
            for (int c0 = 0; c0 < dims.seq_len; c0 += chunk_len) {
                const int cl = std::min(chunk_len, dims.seq_len - c0);
                MatX<S> P = I;             // composed transition so far
                MatX<S> R = MatX<S>::Zero(dh, dh); // accumulated input
                for (int u = 0; u < cl; ++u) {
                    const int col = b * dims.seq_len + c0 + u;
                    if (valid[size_t(col)]) {
                        // token transition A = prod_j (I - b k k^T) * alpha
                        MatX<S> A = I * alpha(h, col);
                        MatX<S> Bm = MatX<S>::Zero(dh, dh);
                        for (int j = 0; j < dims.n_h; ++j) {
                            const VecX<S> k =
                                keys[size_t(j)].col(col).segment(h * dh, dh);
                            const VecX<S> v =
                                values[size_t(j)].col(col).segment(h * dh, dh);
                            const S bta = beta(h * dims.n_h + j, col);
                            const MatX<S> F = I - bta * k * k.transpose();
                            A = F * A;
                            Bm = F * Bm;
                            Bm.noalias() += bta * k * v.transpose();
                        }
                        P = A * P;
                        R = A * R + Bm;
                    }
                    const MatX<S> Ht = P * carry + R;
                    if (valid[size_t(col)])
                        out.col(col).segment(h * dh, dh).noalias() =
                            Ht.transpose() * q.col(col).segment(h * dh, dh);
                }
                carry = P * carry + R;
            }
            h_final.block(h * dh, b * dh, dh, dh) = carry;
        }
    }
}

// Reverse-mode pass for recurrence_sequential. `saved` comes from the
// forward call; gradient matrices must be pre-sized (zeros) and are
// accumulated into.
void recurrence_backward(const RecurrenceDims& dims, const MatX<double>& q,
                         const std::vector<MatX<double>>& keys,
                         const std::vector<MatX<double>>& values,
                         const MatX<double>& beta, const MatX<double>& alpha,
                         const std::vector<MatX<double>>& saved,
                         const std::vector<bool>& valid,
                         const MatX<double>& grad_out,
                         const MatX<double>& grad_hfinal, MatX<double>& gq,
                         std::vector<MatX<double>>& gkeys,
                         std::vector<MatX<double>>& gvalues,
                         MatX<double>& gbeta, MatX<double>& galpha,
                         MatX<double>& gh0);

} // namespace tempo::nn
