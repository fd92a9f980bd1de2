#include "gp/sample.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace tempo::gp {

namespace {

// Returns the summed variance when the tree is built purely from White
// leaves combined by Sum, nullopt otherwise.
std::optional<double> pure_white_variance(const CompositeKernel& k) {
    struct {
        bool ok = true;
        double var = 0.0;
        void walk(const CompositeKernel::Node& n) {
            if (!ok) return;
            if (n.is_leaf) {
                if (const auto* w = std::get_if<White>(&n.leaf))
                    var += w->variance;
                else
                    ok = false;
                return;
            }
            if (n.op != KernelOp::Sum) {
                ok = false;
                return;
            }
            for (const auto& c : n.children) walk(c);
        }
    } w;
    w.walk(k.root);
    if (!w.ok) return std::nullopt;
    return w.var;
}

} // namespace

std::vector<double> sample_gp(const CompositeKernel& kernel,
                              const std::vector<double>& times, Rng& rng,
                              double jitter_start) {
    if (times.empty()) throw std::invalid_argument("sample_gp: empty time grid");
    const Eigen::Index n = static_cast<Eigen::Index>(times.size());

    // Pure white-noise composites have a diagonal gram; skip the dense
    // factorization (long i.i.d. grids would not fit in memory otherwise).
    if (auto var = pure_white_variance(kernel)) {
        const double sd = std::sqrt(*var);
        std::vector<double> path(times.size());
        for (auto& v : path) v = sd * rng.normal();
        return path;
    }

    const Eigen::MatrixXd K = gram(kernel, times);

    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = jitter_start;
    for (;;) {
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += jitter;
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) break;
        jitter *= 10.0;
        if (jitter > 1e-2)
            throw std::runtime_error(
                "sample_gp: covariance not positive definite (final jitter " +
                std::to_string(jitter) + ")");
    }

    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    Eigen::VectorXd path = llt.matrixL() * z;
    return {path.data(), path.data() + n};
}

} // namespace tempo::gp
