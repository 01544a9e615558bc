#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "flowshop/pfsp.hpp"
#include "flowshop/rng.hpp"

namespace flowshop {

// Small fully connected net: rectifier hidden layers, identity output. The
// outputs are raw action values; any policy transformation happens outside.
struct QNetwork {
    std::vector<int> layer_dims;              // [input, hidden..., output]
    std::vector<std::vector<double>> weights; // per layer, row-major [out][in]
    std::vector<std::vector<double>> biases;  // per layer, [out]

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    int layer_count() const { return static_cast<int>(layer_dims.size()) - 1; }
};

inline std::vector<int> default_qnetwork_dims() { return {2, 32, 32, 27}; }

// Weights uniform in +-1/sqrt(fan_in), biases zero.
inline QNetwork make_qnetwork(std::vector<int> dims, Rng& rng) {
    if (dims.size() < 2) throw ContractError("network needs at least input and output layers");
    for (int d : dims)
        if (d < 1) throw ContractError("layer dimensions must be positive");
    QNetwork net;
    net.layer_dims = std::move(dims);
    for (int l = 0; l < net.layer_count(); ++l) {
        const int fan_in = net.layer_dims[l];
        const int fan_out = net.layer_dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
        for (auto& v : w) v = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

namespace detail {

inline void affine_forward(const QNetwork& net, int layer, const std::vector<double>& in,
                           std::vector<double>& out) {
    const int rows = net.layer_dims[layer + 1];
    const int cols = net.layer_dims[layer];
    const auto& w = net.weights[layer];
    const auto& b = net.biases[layer];
    out.assign(rows, 0.0);
    for (int o = 0; o < rows; ++o) {
        double acc = b[o];
        const double* row = w.data() + static_cast<std::size_t>(o) * cols;
        for (int i = 0; i < cols; ++i) acc += row[i] * in[i];
        out[o] = acc;
    }
}

} // namespace detail

inline std::vector<double> forward(const QNetwork& net, std::span<const double> input) {
    if (static_cast<int>(input.size()) != net.input_dim())
        throw ContractError("forward: input dimension mismatch");
    std::vector<double> act(input.begin(), input.end());
    std::vector<double> next;
    for (int l = 0; l < net.layer_count(); ++l) {
        detail::affine_forward(net, l, act, next);
        if (l + 1 < net.layer_count())
            for (auto& v : next) v = v > 0.0 ? v : 0.0;
        act = next;
    }
    return act;
}

struct TrainSample {
    std::vector<double> input;
    int action = 0;
    double target = 0.0;
};

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

// Mean-squared-error gradients through the chosen action's output only.
// Returns the pre-update loss alongside the gradients.
inline Gradients compute_gradients(const QNetwork& net, std::span<const TrainSample> batch,
                                   double& loss_out) {
    if (batch.empty()) throw ContractError("gradient computation needs a non-empty batch");
    Gradients grads;
    for (int l = 0; l < net.layer_count(); ++l) {
        grads.weights.emplace_back(net.weights[l].size(), 0.0);
        grads.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    const double batch_size = static_cast<double>(batch.size());
    double loss = 0.0;
    std::vector<std::vector<double>> acts(net.layer_count() + 1);
    for (const auto& sample : batch) {
        if (!std::isfinite(sample.target)) throw ContractError("non-finite training target");
        if (sample.action < 0 || sample.action >= net.output_dim())
            throw ContractError("training action index out of range");
        if (static_cast<int>(sample.input.size()) != net.input_dim())
            throw ContractError("training input dimension mismatch");

        acts[0] = sample.input;
        for (int l = 0; l < net.layer_count(); ++l) {
            detail::affine_forward(net, l, acts[l], acts[l + 1]);
            if (l + 1 < net.layer_count())
                for (auto& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
        }
        const double diff = acts.back()[sample.action] - sample.target;
        loss += diff * diff / batch_size;

        std::vector<double> delta(net.output_dim(), 0.0);
        delta[sample.action] = 2.0 * diff / batch_size;
        for (int l = net.layer_count() - 1; l >= 0; --l) {
            const int rows = net.layer_dims[l + 1];
            const int cols = net.layer_dims[l];
            auto& gw = grads.weights[l];
            auto& gb = grads.biases[l];
            const auto& in = acts[l];
            for (int o = 0; o < rows; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                gb[o] += d;
                double* gw_row = gw.data() + static_cast<std::size_t>(o) * cols;
                for (int i = 0; i < cols; ++i) gw_row[i] += d * in[i];
            }
            if (l == 0) break;
            std::vector<double> prev(cols, 0.0);
            const auto& w = net.weights[l];
            for (int o = 0; o < rows; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* w_row = w.data() + static_cast<std::size_t>(o) * cols;
                for (int i = 0; i < cols; ++i) prev[i] += d * w_row[i];
            }
            // rectifier mask: act > 0 iff preactivation > 0
            for (int i = 0; i < cols; ++i)
                if (acts[l][i] <= 0.0) prev[i] = 0.0;
            delta = std::move(prev);
        }
    }
    loss_out = loss;
    return grads;
}

// One SGD step toward the targets; returns the pre-step batch loss.
inline double train_step(QNetwork& net, std::span<const TrainSample> batch, double learning_rate) {
    double loss = 0.0;
    const Gradients grads = compute_gradients(net, batch, loss);
    for (int l = 0; l < net.layer_count(); ++l) {
        auto& w = net.weights[l];
        const auto& gw = grads.weights[l];
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= learning_rate * gw[k];
        auto& b = net.biases[l];
        const auto& gb = grads.biases[l];
        for (std::size_t k = 0; k < b.size(); ++k) b[k] -= learning_rate * gb[k];
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Model file: plain text, versioned, decimal values with enough digits to
// reload bit-identically.

struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr const char* kModelMagic = "flowshop-qnet";
inline constexpr int kModelVersion = 1;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void save_model(const QNetwork& net, std::ostream& out) {
    out << detail::kModelMagic << " " << detail::kModelVersion << "\n";
    out << "activation relu\n";
    out << "dims " << net.layer_dims.size();
    for (int d : net.layer_dims) out << " " << d;
    out << "\n";
    for (int l = 0; l < net.layer_count(); ++l) {
        out << "layer " << l << "\n";
        out << "weights " << net.weights[l].size() << "\n";
        for (std::size_t k = 0; k < net.weights[l].size(); ++k)
            out << detail::format_double(net.weights[l][k])
                << ((k + 1) % net.layer_dims[l] == 0 ? "\n" : " ");
        out << "biases " << net.biases[l].size() << "\n";
        for (std::size_t k = 0; k < net.biases[l].size(); ++k)
            out << detail::format_double(net.biases[l][k])
                << (k + 1 == net.biases[l].size() ? "\n" : " ");
    }
    out << "end\n";
}

inline void save_model(const QNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ModelIoError("cannot open model file for writing: " + path);
    save_model(net, out);
    if (!out) throw ModelIoError("failed writing model file: " + path);
}

inline QNetwork load_model(std::istream& in) {
    auto expect_word = [&](const std::string& expected) {
        std::string word;
        if (!(in >> word)) throw ModelIoError("truncated model file (expected '" + expected + "')");
        if (word != expected)
            throw ModelIoError("corrupt model file: expected '" + expected + "', got '" + word +
                               "'");
    };
    expect_word(detail::kModelMagic);
    int version = 0;
    if (!(in >> version)) throw ModelIoError("truncated model file (version)");
    if (version != detail::kModelVersion)
        throw ModelIoError("unsupported model version " + std::to_string(version));
    expect_word("activation");
    std::string activation;
    if (!(in >> activation)) throw ModelIoError("truncated model file (activation)");
    if (activation != "relu") throw ModelIoError("unsupported activation '" + activation + "'");
    expect_word("dims");
    std::size_t dim_count = 0;
    if (!(in >> dim_count) || dim_count < 2) throw ModelIoError("corrupt model file (dims)");
    QNetwork net;
    net.layer_dims.resize(dim_count);
    for (auto& d : net.layer_dims) {
        if (!(in >> d) || d < 1) throw ModelIoError("corrupt model file (layer dimension)");
    }
    for (int l = 0; l < net.layer_count(); ++l) {
        expect_word("layer");
        int layer_no = -1;
        if (!(in >> layer_no) || layer_no != l)
            throw ModelIoError("corrupt model file (layer index)");
        expect_word("weights");
        std::size_t count = 0;
        if (!(in >> count)) throw ModelIoError("truncated model file (weight count)");
        const std::size_t expected =
            static_cast<std::size_t>(net.layer_dims[l]) * net.layer_dims[l + 1];
        if (count != expected)
            throw ModelIoError("model dimension mismatch: layer " + std::to_string(l) +
                               " expects " + std::to_string(expected) + " weights, file has " +
                               std::to_string(count));
        std::vector<double> w(count);
        for (auto& v : w)
            if (!(in >> v)) throw ModelIoError("truncated model file (weights)");
        net.weights.push_back(std::move(w));
        expect_word("biases");
        if (!(in >> count)) throw ModelIoError("truncated model file (bias count)");
        if (count != static_cast<std::size_t>(net.layer_dims[l + 1]))
            throw ModelIoError("model dimension mismatch in biases of layer " + std::to_string(l));
        std::vector<double> b(count);
        for (auto& v : b)
            if (!(in >> v)) throw ModelIoError("truncated model file (biases)");
        net.biases.push_back(std::move(b));
    }
    expect_word("end");
    return net;
}

inline QNetwork load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelIoError("cannot open model file: " + path);
    return load_model(in);
}

} // namespace flowshop
