#include <doctest.h>

#include <cmath>

#include "gp/kernels.hpp"
#include "gp/sample.hpp"

using namespace tempo;
using namespace tempo::gp;

namespace {

std::vector<double> grid(int n, double step = 1.0) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = i * step;
    return t;
}

} // namespace

TEST_CASE("white kernel gram is identity") {
    CompositeKernel k;
    k.root.leaf = White{1.0};
    auto K = gram(k, grid(16));
    CHECK((K - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rbf closed-form values") {
    CompositeKernel k;
    k.root.leaf = RBF{1.0};
    auto K = gram(k, grid(4));
    CHECK(K(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(K(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("gram symmetric to the last bit") {
    Rng rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        auto k = sample_composite_kernel(rng, KernelBank::uniform(), 6, 64.0);
        auto K = gram(k, grid(12, 0.7));
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) CHECK(K(i, j) == K(j, i));
    }
}

TEST_CASE("sum/product gram equals brute-force per-entry combination") {
    // two fixed leaves, manually combined
    CompositeKernel a, b;
    a.root.leaf = RBF{2.0};
    b.root.leaf = Periodic{0.8, 5.0};

    CompositeKernel sum;
    sum.root.is_leaf = false;
    sum.root.op = KernelOp::Sum;
    sum.root.children = {a.root, b.root};

    CompositeKernel prod;
    prod.root.is_leaf = false;
    prod.root.op = KernelOp::Product;
    prod.root.children = {a.root, b.root};

    auto t = grid(10, 0.9);
    auto Ka = gram(a, t), Kb = gram(b, t), Ks = gram(sum, t), Kp = gram(prod, t);
    CHECK((Ks - (Ka + Kb)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((Kp - Ka.cwiseProduct(Kb)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("max_kernels=1 gives single leaf; leaf count bounded") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        auto k1 = sample_composite_kernel(rng, KernelBank::uniform(), 1, 100.0);
        CHECK(k1.leaf_count() == 1);
        auto k6 = sample_composite_kernel(rng, KernelBank::uniform(), 6, 100.0);
        CHECK(k6.leaf_count() >= 1);
        CHECK(k6.leaf_count() <= 6);
    }
}

TEST_CASE("kernel sampling deterministic under fixed seed") {
    Rng a(77), b(77);
    auto ka = sample_composite_kernel(a, KernelBank::uniform(), 6, 128.0);
    auto kb = sample_composite_kernel(b, KernelBank::uniform(), 6, 128.0);
    CHECK(ka.describe() == kb.describe());
    auto Ka = gram(ka, grid(8)), Kb = gram(kb, grid(8));
    CHECK((Ka - Kb).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bank weights respected over many draws") {
    // weight the bank toward two entries; multinomial 3-sigma band
    KernelBank bank = KernelBank::uniform();
    Rng rng(301);
    const int draws = 10000;
    std::vector<int> counts(8, 0);
    for (int i = 0; i < draws; ++i) {
        auto k = sample_composite_kernel(rng, bank, 1, 64.0);
        // single leaf: recover its variant index
        struct {
            int idx = -1;
            void walk(const CompositeKernel::Node& n) {
                if (n.is_leaf) idx = int(n.leaf.index());
                else for (const auto& c : n.children) walk(c);
            }
        } w;
        w.walk(k.root);
        counts[size_t(w.idx)]++;
    }
    const double p = 1.0 / 8.0;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (int c : counts) CHECK(std::abs(c - draws * p) < 3.5 * sigma);
}

TEST_CASE("white kernel path variance near 1") {
    CompositeKernel k;
    k.root.leaf = White{1.0};
    Rng rng(17);
    auto path = sample_gp(k, grid(50000), rng);
    double sq = 0;
    for (double v : path) sq += v * v;
    CHECK(sq / double(path.size()) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("constant kernel path is constant") {
    CompositeKernel k;
    k.root.leaf = Constant{2.0};
    Rng rng(23);
    auto path = sample_gp(k, grid(64), rng);
    // equal up to the PSD-repair jitter
    for (double v : path) CHECK(v == doctest::Approx(path[0]).epsilon(1e-3));
}

TEST_CASE("sample_gp deterministic under fixed seed") {
    CompositeKernel k;
    k.root.leaf = RBF{3.0};
    Rng a(31), b(31);
    auto pa = sample_gp(k, grid(32), a);
    auto pb = sample_gp(k, grid(32), b);
    CHECK(pa == pb);
}

TEST_CASE("empirical covariance of many paths matches gram") {
    CompositeKernel k;
    k.root.is_leaf = false;
    k.root.op = KernelOp::Sum;
    CompositeKernel::Node l1, l2;
    l1.leaf = RBF{2.0};
    l2.leaf = White{0.25};
    k.root.children = {l1, l2};

    auto t = grid(8);
    auto K = gram(k, t);
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(8, 8);
    Rng rng(5150);
    const int paths = 20000;
    for (int p = 0; p < paths; ++p) {
        auto path = sample_gp(k, t, rng);
        Eigen::Map<Eigen::VectorXd> v(path.data(), 8);
        emp += v * v.transpose();
    }
    emp /= double(paths);
    const double rel = (emp - K).norm() / K.norm();
    CHECK(rel < 0.05);
}
