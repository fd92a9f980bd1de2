#include "gp/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace tempo::gp {

double eval_base(const BaseKernel& k, double t1, double t2) {
    const double d = t1 - t2;
    const double ad = std::abs(d);
    return std::visit(
        [&](const auto& kk) -> double {
            using T = std::decay_t<decltype(kk)>;
            if constexpr (std::is_same_v<T, RBF>) {
                const double r = d / kk.lengthscale;
                return std::exp(-0.5 * r * r);
            } else if constexpr (std::is_same_v<T, RationalQuadratic>) {
                const double r = d / kk.lengthscale;
                return std::pow(1.0 + r * r / (2.0 * kk.alpha), -kk.alpha);
            } else if constexpr (std::is_same_v<T, Periodic>) {
                const double s = std::sin(M_PI * ad / kk.period) / kk.lengthscale;
                return std::exp(-2.0 * s * s);
            } else if constexpr (std::is_same_v<T, White>) {
                return d == 0.0 ? kk.variance : 0.0;
            } else if constexpr (std::is_same_v<T, Linear>) {
                return kk.variance * (t1 - kk.offset) * (t2 - kk.offset);
            } else if constexpr (std::is_same_v<T, Matern>) {
                const double r = ad / kk.lengthscale;
                if (kk.nu == 0.5) return std::exp(-r);
                if (kk.nu == 1.5) {
                    const double a = std::sqrt(3.0) * r;
                    return (1.0 + a) * std::exp(-a);
                }
                const double a = std::sqrt(5.0) * r;
                return (1.0 + a + a * a / 3.0) * std::exp(-a);
            } else if constexpr (std::is_same_v<T, Polynomial>) {
                return std::pow(kk.variance * t1 * t2 + 1.0, kk.degree);
            } else {
                return kk.value;
            }
        },
        k);
}

std::string base_kernel_name(const BaseKernel& k) {
    static const char* names[] = {"rbf",    "rq",     "periodic",   "white",
                                  "linear", "matern", "polynomial", "constant"};
    return names[k.index()];
}

size_t CompositeKernel::leaf_count() const {
    struct {
        size_t count(const Node& n) {
            if (n.is_leaf) return 1;
            size_t c = 0;
            for (const auto& ch : n.children) c += count(ch);
            return c;
        }
    } walker;
    return walker.count(root);
}

std::string CompositeKernel::describe() const {
    struct {
        std::string walk(const Node& n) {
            if (n.is_leaf) return base_kernel_name(n.leaf);
            std::string s = "(";
            for (size_t i = 0; i < n.children.size(); ++i) {
                if (i) s += n.op == KernelOp::Sum ? "+" : "*";
                s += walk(n.children[i]);
            }
            return s + ")";
        }
    } walker;
    return walker.walk(root);
}

double CompositeKernel::dominant_period() const {
    struct {
        double best = 0.0;
        void walk(const Node& n) {
            if (n.is_leaf) {
                if (const auto* p = std::get_if<Periodic>(&n.leaf))
                    best = std::max(best, p->period);
                return;
            }
            for (const auto& ch : n.children) walk(ch);
        }
    } walker;
    walker.walk(root);
    return walker.best;
}

double eval_kernel(const CompositeKernel& k, double t1, double t2) {
    struct {
        double walk(const CompositeKernel::Node& n, double a, double b) {
            if (n.is_leaf) return eval_base(n.leaf, a, b);
            double acc = n.op == KernelOp::Sum ? 0.0 : 1.0;
            for (const auto& ch : n.children) {
                const double v = walk(ch, a, b);
                if (n.op == KernelOp::Sum)
                    acc += v;
                else
                    acc *= v;
            }
            return acc;
        }
    } walker;
    return walker.walk(k.root, t1, t2);
}

KernelBank KernelBank::uniform() {
    KernelBank b;
    b.weights.assign(8, 1.0);
    return b;
}

KernelBank KernelBank::kernel_synth() {
    KernelBank b;
    b.weights.assign(8, 0.0);
    b.weights[0] = 1.0; // RBF
    b.weights[1] = 1.0; // RationalQuadratic
    b.weights[2] = 1.0; // Periodic
    b.weights[3] = 1.0; // White
    return b;
}

namespace {

BaseKernel sample_leaf(Rng& rng, const KernelBank& bank, double series_length) {
    switch (rng.weighted_index(bank.weights)) {
        case 0: return RBF{rng.log_uniform(series_length / 64.0, series_length)};
        case 1:
            return RationalQuadratic{rng.log_uniform(series_length / 64.0, series_length),
                                     rng.log_uniform(0.1, 10.0)};
        case 2:
            return Periodic{rng.log_uniform(0.3, 3.0),
                            rng.log_uniform(series_length * bank.period_min_frac,
                                            series_length * bank.period_max_frac)};
        case 3: return White{rng.log_uniform(0.01, 1.0)};
        case 4:
            return Linear{rng.log_uniform(1e-4, 1e-2) / std::max(1.0, series_length),
                          rng.uniform(0.0, series_length)};
        case 5: {
            static const double nus[] = {0.5, 1.5, 2.5};
            return Matern{rng.log_uniform(series_length / 64.0, series_length),
                          nus[rng.uniform_int(0, 2)]};
        }
        case 6:
            return Polynomial{static_cast<int>(rng.uniform_int(1, 4)),
                              rng.log_uniform(1e-4, 1e-2) /
                                  std::max(1.0, series_length * series_length)};
        default: return Constant{rng.uniform(0.1, 2.0)};
    }
}

} // namespace

CompositeKernel sample_composite_kernel(Rng& rng, const KernelBank& bank,
                                        int max_kernels, double series_length) {
    if (max_kernels < 1 || max_kernels > 6)
        throw std::invalid_argument("max_kernels must be in [1, 6]");
    const int n = static_cast<int>(rng.uniform_int(1, max_kernels));

    CompositeKernel k;
    k.root.is_leaf = true;
    k.root.leaf = sample_leaf(rng, bank, series_length);
    // grow left-deep: combine the current tree with a fresh leaf
    for (int i = 1; i < n; ++i) {
        CompositeKernel::Node parent;
        parent.is_leaf = false;
        parent.op = rng.bernoulli(0.5) ? KernelOp::Sum : KernelOp::Product;
        CompositeKernel::Node leaf;
        leaf.is_leaf = true;
        leaf.leaf = sample_leaf(rng, bank, series_length);
        parent.children.push_back(std::move(k.root));
        parent.children.push_back(std::move(leaf));
        k.root = std::move(parent);
    }
    return k;
}

Eigen::MatrixXd gram(const CompositeKernel& k, const std::vector<double>& times) {
    const Eigen::Index n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = eval_kernel(k, times[i], times[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    return K;
}

} // namespace tempo::gp
