#include "nn/recurrence.hpp"

namespace tempo::nn {

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
                         MatX<double>& gh0) {
    const int dh = dims.head_dim;
    for (int b = 0; b < dims.batch; ++b) {
        for (int h = 0; h < dims.heads; ++h) {
            // GH accumulates dL/d(state) flowing backward in time
            MatX<double> GH = grad_hfinal.block(h * dh, b * dh, dh, dh);
            for (int t = dims.seq_len - 1; t >= 0; --t) {
                const int col = b * dims.seq_len + t;
                if (!valid[size_t(col)]) continue;
                const MatX<double> Hprev = saved[size_t(t)].block(h * dh, b * dh, dh, dh);
                const double a = alpha(h, col);

                // recompute the sub-step states for this token
                std::vector<MatX<double>> sub(size_t(dims.n_h) + 1);
                sub[0] = a * Hprev;
                for (int j = 0; j < dims.n_h; ++j) {
                    sub[size_t(j) + 1] = sub[size_t(j)];
                    const VecX<double> k = keys[size_t(j)].col(col).segment(h * dh, dh);
                    const VecX<double> v =
                        values[size_t(j)].col(col).segment(h * dh, dh);
                    householder_step<double>(sub[size_t(j) + 1], k, v,
                                             beta(h * dims.n_h + j, col));
                }

                // output o = H_t^T q
                const VecX<double> go = grad_out.col(col).segment(h * dh, dh);
                const VecX<double> qv = q.col(col).segment(h * dh, dh);
                gq.col(col).segment(h * dh, dh).noalias() += sub.back() * go;
                GH.noalias() += qv * go.transpose();

                for (int j = dims.n_h - 1; j >= 0; --j) {
                    const VecX<double> k = keys[size_t(j)].col(col).segment(h * dh, dh);
                    const VecX<double> v =
                        values[size_t(j)].col(col).segment(h * dh, dh);
                    const double bta = beta(h * dims.n_h + j, col);
                    const MatX<double>& H = sub[size_t(j)];
                    const MatX<double>& g = GH;

                    const VecX<double> gTk = g.transpose() * k;
                    const VecX<double> HTk = H.transpose() * k;
                    gkeys[size_t(j)].col(col).segment(h * dh, dh).noalias() +=
                        -bta * (g * HTk + H * gTk) + bta * (g * v);
                    gvalues[size_t(j)].col(col).segment(h * dh, dh).noalias() +=
                        bta * gTk;
                    gbeta(h * dims.n_h + j, col) += (v - HTk).dot(gTk);
                    // dH = (I - beta k k^T) g
                    GH.noalias() -= bta * k * gTk.transpose();
                }

                galpha(h, col) += GH.cwiseProduct(Hprev).sum();
                GH *= a;
            }
            gh0.block(h * dh, b * dh, dh, dh) += GH;
        }
    }
}

} // namespace tempo::nn
