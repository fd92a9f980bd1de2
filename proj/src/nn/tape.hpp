#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace tempo::nn {

using Mat = Eigen::MatrixXd;

// Minimal reverse-mode tape over dense matrices. Nodes are created in
// topological order; backward() walks them in reverse. Heavy operations
// (recurrence, convolution) register custom closures. With recording off
// the builders still compute values but keep no closures, which is the
// inference path.
class Tape {
public:
    struct Node {
        Mat val;
        Mat grad; // lazily sized
        std::function<void()> back;
    };

    bool recording = true;

    int leaf(Mat v);
    const Mat& val(int id) const { return nodes_[size_t(id)].val; }
    Mat& grad(int id);
    size_t size() const { return nodes_.size(); }

    // y = W * x
    int matmul(int w, int x);
    int add(int a, int b);
    int sub(int a, int b);
    int cmul(int a, int b); // elementwise
    int scale(int a, double c);
    // adds a column vector to every column
    int add_col(int x, int col);
    int silu(int x);
    int sigmoid(int x);
    // exp(-softplus(x)), the forget-gate squash with range (0, 1)
    int exp_neg_softplus(int x);
    // per-column RMS normalization with a learnable gain vector, eps 1e-6
    int rmsnorm(int x, int gain);
    // per-column block-wise l2 normalization: each vertical block of
    // block_rows rows is scaled to (near) unit norm, y = x / sqrt(|x|^2 + eps)
    int l2norm_blocks(int x, int block_rows);
    // causal depthwise convolution along columns within each group of
    // seq_len consecutive columns; kernel is rows x k, kernel col k-1
    // multiplies the current position
    int causal_conv(int x, int kernel, int seq_len);
    int sum(int x); // 1x1
    // repeats the matrix horizontally; backward sums the copies
    int tile_cols(int x, int times);

    // custom node: the closure reads grad(id) and accumulates into any
    // earlier node's grad directly
    int custom(Mat val, std::function<void()> back);

    void backward(int loss_id);

private:
    std::vector<Node> nodes_;
    int push(Mat v, std::function<void()> back);
};

} // namespace tempo::nn
