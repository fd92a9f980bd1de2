#pragma once

#include <vector>

#include "core/rng.hpp"
#include "core/timeseries.hpp"
#include "gp/kernels.hpp"

namespace tempo::gen {

enum class ScmActivation { Relu, Sigmoid, Sin, Tanh, Identity };

enum class ScmMeanKind { Zero, Constant, Linear, Sinusoid };

struct ScmMean {
    ScmMeanKind kind = ScmMeanKind::Zero;
    double a = 0.0; // level / slope / amplitude
    double b = 0.0; // period for Sinusoid
    double c = 0.0; // phase for Sinusoid

    double evaluate(double t, double length) const;
};

// One node of the structural causal graph. Parents always point at earlier
// indices, so node order is a topological order. Roots (no parents) are GP
// draws with a stochastic mean; other nodes apply an activation to an
// affine combination of their parents.
struct ScmNode {
    std::vector<size_t> parents;
    std::vector<double> weights;
    double bias = 0.0;
    ScmActivation activation = ScmActivation::Identity;
    gp::CompositeKernel kernel; // roots only
    ScmMean mean;               // roots only
};

struct ScmGraph {
    std::vector<ScmNode> nodes;
    std::vector<size_t> channels; // node index per output channel

    void validate() const; // acyclic order, parent bounds, channel bounds
};

// 7 hidden nodes plus one node per output channel; in-degree capped at 3.
// Channel nodes draw their parents round-robin from the hidden sinks.
ScmGraph sample_scm_graph(Rng& rng, size_t n_hidden = 7, size_t n_channels = 21,
                          size_t max_in_degree = 3);

// Evaluates every node on the grid t = 0..length-1 and returns the channel
// rows in order.
std::vector<std::vector<double>> evaluate_scm(const ScmGraph& graph, Rng& rng,
                                              size_t length);

std::vector<TimeSeries> gen_cauker(Rng& rng, size_t length, const Frequency& freq);

} // namespace tempo::gen
