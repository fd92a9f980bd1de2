#include "gen/cauker.hpp"

#include <cmath>
#include <stdexcept>

#include "gp/sample.hpp"

namespace tempo::gen {

double ScmMean::evaluate(double t, double length) const {
    switch (kind) {
        case ScmMeanKind::Zero: return 0.0;
        case ScmMeanKind::Constant: return a;
        case ScmMeanKind::Linear: return a * t / length;
        case ScmMeanKind::Sinusoid:
            return a * std::sin(2.0 * M_PI * t / b + c);
    }
    return 0.0;
}

void ScmGraph::validate() const {
    for (size_t i = 0; i < nodes.size(); ++i) {
        const auto& nd = nodes[i];
        if (nd.parents.size() != nd.weights.size())
            throw std::invalid_argument("ScmGraph: parent/weight size mismatch");
        for (size_t p : nd.parents)
            if (p >= i)
                throw std::invalid_argument("ScmGraph: parent index breaks topological order");
    }
    for (size_t c : channels)
        if (c >= nodes.size())
            throw std::invalid_argument("ScmGraph: channel index out of range");
}

namespace {

double activate(ScmActivation a, double x) {
    switch (a) {
        case ScmActivation::Relu: return x > 0.0 ? x : 0.0;
        case ScmActivation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case ScmActivation::Sin: return std::sin(x);
        case ScmActivation::Tanh: return std::tanh(x);
        case ScmActivation::Identity: return x;
    }
    return x;
}

ScmActivation sample_activation(Rng& rng) {
    return ScmActivation(rng.uniform_int(0, 4));
}

ScmMean sample_mean(Rng& rng, double length) {
    ScmMean m;
    m.kind = ScmMeanKind(rng.uniform_int(0, 3));
    switch (m.kind) {
        case ScmMeanKind::Zero: break;
        case ScmMeanKind::Constant: m.a = rng.uniform(-2.0, 2.0); break;
        case ScmMeanKind::Linear: m.a = rng.uniform(-3.0, 3.0); break;
        case ScmMeanKind::Sinusoid:
            m.a = rng.uniform(0.3, 2.0);
            m.b = rng.log_uniform(length / 32.0, length / 2.0);
            m.c = rng.uniform(0.0, 2.0 * M_PI);
            break;
    }
    return m;
}

} // namespace

ScmGraph sample_scm_graph(Rng& rng, size_t n_hidden, size_t n_channels,
                          size_t max_in_degree) {
    ScmGraph g;
    const gp::KernelBank bank = gp::KernelBank::kernel_synth();

    for (size_t i = 0; i < n_hidden; ++i) {
        ScmNode nd;
        const size_t cap = std::min(max_in_degree, i);
        const size_t deg = cap == 0 ? 0 : size_t(rng.uniform_int(0, int64_t(cap)));
        // sample distinct parents among earlier hidden nodes
        std::vector<size_t> pool(i);
        for (size_t j = 0; j < i; ++j) pool[j] = j;
        for (size_t d = 0; d < deg; ++d) {
            const size_t pick = size_t(rng.uniform_int(0, int64_t(pool.size() - 1)));
            nd.parents.push_back(pool[pick]);
            nd.weights.push_back(rng.uniform(-1.5, 1.5));
            pool.erase(pool.begin() + int64_t(pick));
        }
        nd.bias = rng.uniform(-0.5, 0.5);
        nd.activation = sample_activation(rng);
        g.nodes.push_back(std::move(nd));
    }

    // hidden nodes nobody consumes yet
    std::vector<bool> consumed(n_hidden, false);
    for (const auto& nd : g.nodes)
        for (size_t p : nd.parents) consumed[p] = true;
    std::vector<size_t> sinks;
    for (size_t i = 0; i < n_hidden; ++i)
        if (!consumed[i]) sinks.push_back(i);
    if (sinks.empty()) sinks.push_back(n_hidden - 1);

    for (size_t c = 0; c < n_channels; ++c) {
        ScmNode nd;
        const size_t deg = size_t(rng.uniform_int(1, int64_t(max_in_degree)));
        nd.parents.push_back(sinks[c % sinks.size()]);
        nd.weights.push_back(rng.uniform(-1.5, 1.5));
        for (size_t d = 1; d < deg; ++d) {
            const size_t p = size_t(rng.uniform_int(0, int64_t(n_hidden - 1)));
            nd.parents.push_back(p);
            nd.weights.push_back(rng.uniform(-1.5, 1.5));
        }
        nd.bias = rng.uniform(-0.5, 0.5);
        nd.activation = sample_activation(rng);
        g.channels.push_back(g.nodes.size());
        g.nodes.push_back(std::move(nd));
    }
    return g;
}

std::vector<std::vector<double>> evaluate_scm(const ScmGraph& graph, Rng& rng,
                                              size_t length) {
    graph.validate();

    std::vector<double> times(length);
    for (size_t t = 0; t < length; ++t) times[t] = double(t);

    std::vector<std::vector<double>> values(graph.nodes.size());
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& nd = graph.nodes[i];
        if (nd.parents.empty()) {
            values[i] = gp::sample_gp(nd.kernel, times, rng);
            for (size_t t = 0; t < length; ++t)
                values[i][t] += nd.mean.evaluate(double(t), double(length));
        } else {
            values[i].resize(length);
            for (size_t t = 0; t < length; ++t) {
                double acc = nd.bias;
                for (size_t p = 0; p < nd.parents.size(); ++p)
                    acc += nd.weights[p] * values[nd.parents[p]][t];
                values[i][t] = activate(nd.activation, acc);
            }
        }
    }

    std::vector<std::vector<double>> channels;
    channels.reserve(graph.channels.size());
    for (size_t c : graph.channels) channels.push_back(values[c]);
    return channels;
}

std::vector<TimeSeries> gen_cauker(Rng& rng, size_t length, const Frequency& freq) {
    ScmGraph g = sample_scm_graph(rng);
    // give roots explicit kernels and stochastic means
    const gp::KernelBank bank = gp::KernelBank::kernel_synth();
    for (auto& nd : g.nodes) {
        if (!nd.parents.empty()) continue;
        nd.kernel = gp::sample_composite_kernel(rng, bank, 4, double(length));
        nd.mean = sample_mean(rng, double(length));
    }
    auto rows = evaluate_scm(g, rng, length);

    std::vector<TimeSeries> out;
    out.reserve(rows.size());
    for (size_t c = 0; c < rows.size(); ++c) {
        TimeSeries ts = TimeSeries::with_values(std::move(rows[c]));
        ts.freq = freq;
        ts.provenance = "cauker";
        ts.id = "cauker_ch" + std::to_string(c);
        out.push_back(std::move(ts));
    }
    return out;
}

} // namespace tempo::gen
