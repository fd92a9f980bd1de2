#include "nn/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace tempo::nn {

int Tape::push(Mat v, std::function<void()> back) {
    Node n;
    n.val = std::move(v);
    if (recording) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return int(nodes_.size()) - 1;
}

int Tape::leaf(Mat v) { return push(std::move(v), {}); }

Mat& Tape::grad(int id) {
    Node& n = nodes_[size_t(id)];
    if (n.grad.size() == 0) n.grad = Mat::Zero(n.val.rows(), n.val.cols());
    return n.grad;
}

int Tape::matmul(int w, int x) {
    Mat y = val(w) * val(x);
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, w, x] {
        const Mat& g = grad(id);
        grad(w) += g * val(x).transpose();
        grad(x) += val(w).transpose() * g;
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::add(int a, int b) {
    int id = push(val(a) + val(b), {});
    nodes_[size_t(id)].back = [this, id, a, b] {
        grad(a) += grad(id);
        grad(b) += grad(id);
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::sub(int a, int b) {
    int id = push(val(a) - val(b), {});
    nodes_[size_t(id)].back = [this, id, a, b] {
        grad(a) += grad(id);
        grad(b) -= grad(id);
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::cmul(int a, int b) {
    int id = push(val(a).cwiseProduct(val(b)), {});
    nodes_[size_t(id)].back = [this, id, a, b] {
        grad(a) += grad(id).cwiseProduct(val(b));
        grad(b) += grad(id).cwiseProduct(val(a));
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::scale(int a, double c) {
    int id = push(val(a) * c, {});
    nodes_[size_t(id)].back = [this, id, a, c] { grad(a) += grad(id) * c; };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::add_col(int x, int col) {
    Mat y = val(x);
    y.colwise() += Eigen::VectorXd(val(col).col(0));
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x, col] {
        grad(x) += grad(id);
        grad(col) += grad(id).rowwise().sum();
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::silu(int x) {
    const Mat& v = val(x);
    Mat s = v.unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(-a)); });
    int id = push(v.cwiseProduct(s), {});
    nodes_[size_t(id)].back = [this, id, x, s] {
        const Mat& v2 = val(x);
        // d/dx x*sig(x) = sig(x) (1 + x (1 - sig(x)))
        Mat d = s.cwiseProduct(Mat::Ones(v2.rows(), v2.cols()) +
                               v2.cwiseProduct(Mat::Ones(v2.rows(), v2.cols()) - s));
        grad(x) += grad(id).cwiseProduct(d);
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::sigmoid(int x) {
    Mat s = val(x).unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(-a)); });
    int id = push(s, {});
    nodes_[size_t(id)].back = [this, id, x] {
        const Mat& y = val(id);
        grad(x) += grad(id).cwiseProduct(
            y.cwiseProduct(Mat::Ones(y.rows(), y.cols()) - y));
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::exp_neg_softplus(int x) {
    // y = exp(-softplus(x)) = 1 / (1 + e^x) = sigmoid(-x)
    Mat y = val(x).unaryExpr([](double a) { return 1.0 / (1.0 + std::exp(a)); });
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x] {
        const Mat& y2 = val(id);
        // dy/dx = -y (1 - y)
        grad(x) -= grad(id).cwiseProduct(
            y2.cwiseProduct(Mat::Ones(y2.rows(), y2.cols()) - y2));
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::rmsnorm(int x, int gain) {
    const Mat& v = val(x);
    const double eps = 1e-6;
    const Eigen::Index d = v.rows();
    Eigen::RowVectorXd inv_rms(v.cols());
    for (Eigen::Index c = 0; c < v.cols(); ++c)
        inv_rms(c) = 1.0 / std::sqrt(v.col(c).squaredNorm() / double(d) + eps);
    Mat y = (v.array().rowwise() * inv_rms.array()).matrix();
    Mat out = y.array().colwise() * val(gain).col(0).array();
    int id = push(std::move(out), {});
    nodes_[size_t(id)].back = [this, id, x, gain, inv_rms, y] {
        const Mat& g = grad(id);
        const Mat& v2 = val(x);
        const Eigen::Index dd = v2.rows();
        // gain grad: sum over columns of g .* y
        grad(gain) += g.cwiseProduct(y).rowwise().sum();
        // x grad: per column, with r = inv_rms:
        // dx = gain.*g * r - x * r^3/d * (x . (gain.*g))
        Mat gg = g.array().colwise() * val(gain).col(0).array();
        Mat& gx = grad(x);
        for (Eigen::Index c = 0; c < v2.cols(); ++c) {
            const double r = inv_rms(c);
            const double dot = v2.col(c).dot(gg.col(c));
            gx.col(c) += gg.col(c) * r - v2.col(c) * (r * r * r * dot / double(dd));
        }
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::l2norm_blocks(int x, int block_rows) {
    const Mat& v = val(x);
    const double eps = 1e-12;
    if (v.rows() % block_rows != 0)
        throw std::invalid_argument("l2norm_blocks: rows not divisible by block");
    Mat y(v.rows(), v.cols());
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        for (Eigen::Index b = 0; b < v.rows(); b += block_rows) {
            const auto seg = v.col(c).segment(b, block_rows);
            const double s = std::sqrt(seg.squaredNorm() + eps);
            y.col(c).segment(b, block_rows) = seg / s;
        }
    }
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x, block_rows, eps] {
        const Mat& g = grad(id);
        const Mat& v2 = val(x);
        const Mat& y2 = val(id);
        Mat& gx = grad(x);
        for (Eigen::Index c = 0; c < v2.cols(); ++c) {
            for (Eigen::Index b = 0; b < v2.rows(); b += block_rows) {
                const auto xs = v2.col(c).segment(b, block_rows);
                const auto ys = y2.col(c).segment(b, block_rows);
                const auto gs = g.col(c).segment(b, block_rows);
                const double s = std::sqrt(xs.squaredNorm() + eps);
                gx.col(c).segment(b, block_rows) += (gs - ys * ys.dot(gs)) / s;
            }
        }
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::causal_conv(int x, int kernel, int seq_len) {
    const Mat& v = val(x);
    const Mat& k = val(kernel);
    const Eigen::Index klen = k.cols();
    if (v.cols() % seq_len != 0)
        throw std::invalid_argument("causal_conv: columns not divisible by seq_len");
    Mat y = Mat::Zero(v.rows(), v.cols());
    for (Eigen::Index s = 0; s < v.cols(); s += seq_len) {
        for (Eigen::Index t = 0; t < seq_len; ++t) {
            for (Eigen::Index j = 0; j < klen; ++j) {
                const Eigen::Index src = t - (klen - 1 - j);
                if (src < 0) continue;
                y.col(s + t) += k.col(j).cwiseProduct(v.col(s + src));
            }
        }
    }
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x, kernel, seq_len] {
        const Mat& g = grad(id);
        const Mat& v2 = val(x);
        const Mat& k2 = val(kernel);
        const Eigen::Index klen = k2.cols();
        Mat& gx = grad(x);
        Mat& gk = grad(kernel);
        for (Eigen::Index s = 0; s < v2.cols(); s += seq_len) {
            for (Eigen::Index t = 0; t < seq_len; ++t) {
                for (Eigen::Index j = 0; j < klen; ++j) {
                    const Eigen::Index src = t - (klen - 1 - j);
                    if (src < 0) continue;
                    gx.col(s + src) += k2.col(j).cwiseProduct(g.col(s + t));
                    gk.col(j) += v2.col(s + src).cwiseProduct(g.col(s + t));
                }
            }
        }
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::sum(int x) {
    Mat y(1, 1);
    y(0, 0) = val(x).sum();
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x] {
        grad(x).array() += grad(id)(0, 0);
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::tile_cols(int x, int times) {
    const Mat& v = val(x);
    Mat y(v.rows(), v.cols() * times);
    for (int i = 0; i < times; ++i) y.middleCols(i * v.cols(), v.cols()) = v;
    int id = push(std::move(y), {});
    nodes_[size_t(id)].back = [this, id, x, times] {
        const Mat& g = grad(id);
        const Eigen::Index c = val(x).cols();
        for (int i = 0; i < times; ++i) grad(x) += g.middleCols(i * c, c);
    };
    if (!recording) nodes_[size_t(id)].back = {};
    return id;
}

int Tape::custom(Mat val, std::function<void()> back) {
    return push(std::move(val), std::move(back));
}

void Tape::backward(int loss_id) {
    if (!recording) throw std::logic_error("Tape::backward: recording was off");
    grad(loss_id).setOnes();
    for (int i = loss_id; i >= 0; --i) {
        Node& n = nodes_[size_t(i)];
        if (n.back && n.grad.size() != 0) n.back();
    }
}

} // namespace tempo::nn
