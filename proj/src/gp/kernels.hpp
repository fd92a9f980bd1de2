#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "core/rng.hpp"

namespace tempo::gp {

// Base covariance kernels. All scale/lengthscale/period parameters are
// strictly positive.
struct RBF { double lengthscale = 1.0; };
struct RationalQuadratic { double lengthscale = 1.0; double alpha = 1.0; };
struct Periodic { double lengthscale = 1.0; double period = 1.0; };
struct White { double variance = 1.0; };
struct Linear { double variance = 1.0; double offset = 0.0; };
struct Matern { double lengthscale = 1.0; double nu = 1.5; }; // nu in {0.5, 1.5, 2.5}
struct Polynomial { int degree = 2; double variance = 1.0; }; // degree <= 4
struct Constant { double value = 1.0; };

using BaseKernel = std::variant<RBF, RationalQuadratic, Periodic, White, Linear,
                                Matern, Polynomial, Constant>;

double eval_base(const BaseKernel& k, double t1, double t2);
std::string base_kernel_name(const BaseKernel& k);

enum class KernelOp { Sum, Product };

// Expression tree: leaf = BaseKernel, internal node = Sum/Product over >= 2
// children. Leaf count between 1 and 6.
struct CompositeKernel {
    struct Node {
        bool is_leaf = true;
        BaseKernel leaf;
        KernelOp op = KernelOp::Sum;
        std::vector<Node> children;
    };
    Node root;

    size_t leaf_count() const;
    std::string describe() const;
    // Largest period among Periodic leaves, or 0 when none exist.
    double dominant_period() const;
};

double eval_kernel(const CompositeKernel& k, double t1, double t2);

// Weighted kernel bank. Entry order matches the BaseKernel variant order.
struct KernelBank {
    std::vector<double> weights; // size 8
    double period_min_frac = 1.0 / 64.0; // periods as fractions of series length
    double period_max_frac = 0.5;

    static KernelBank uniform();
    // KernelSynth-style subset: Periodic, RBF, RationalQuadratic, White.
    static KernelBank kernel_synth();
};

// Leaf count uniform on [1, max_kernels], leaves from the weighted bank,
// operators uniform on {Sum, Product}; Periodic periods log-uniform over
// [len * period_min_frac, len * period_max_frac].
CompositeKernel sample_composite_kernel(Rng& rng, const KernelBank& bank,
                                        int max_kernels, double series_length);

// Gram matrix K[i][j] = k(t_i, t_j); symmetric to the last bit (upper
// triangle mirrored).
Eigen::MatrixXd gram(const CompositeKernel& k, const std::vector<double>& times);

} // namespace tempo::gp
