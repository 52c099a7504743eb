#pragma once

// Learning substrate: MLP models with ReLU hidden layers and a
// softmax/cross-entropy head, local minibatch SGD, native FedAvg, the fixed
// traversal order that flattens a model into one vector, and the fixed-point
// codec that carries weights across the integer aggregation boundary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zkdfl/rng.hpp"

namespace zkdfl::fl {

using FlatWeights = std::vector<double>;

struct MlpModel {
    std::vector<std::size_t> layer_sizes;       // [n_in, hidden..., n_out]
    std::vector<std::vector<double>> weights;   // per layer, n_out x n_in row-major
    std::vector<std::vector<double>> biases;    // per layer, n_out

    static MlpModel zeros(std::vector<std::size_t> sizes) {
        if (sizes.size() < 2) throw std::invalid_argument("MlpModel: need at least two layers");
        MlpModel m;
        m.layer_sizes = std::move(sizes);
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
            m.weights.emplace_back(m.layer_sizes[l + 1] * m.layer_sizes[l], 0.0);
            m.biases.emplace_back(m.layer_sizes[l + 1], 0.0);
        }
        return m;
    }

    // Shared starting point: uniform in +-sqrt(1/n_in) per layer.
    static MlpModel init(std::vector<std::size_t> sizes, u64 seed) {
        MlpModel m = zeros(std::move(sizes));
        SplitMix64 rng(seed);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            double bound = std::sqrt(1.0 / (double)m.layer_sizes[l]);
            for (auto& w : m.weights[l]) w = (2.0 * rng.next_double() - 1.0) * bound;
            for (auto& b : m.biases[l]) b = (2.0 * rng.next_double() - 1.0) * bound;
        }
        return m;
    }

    std::size_t num_layers() const { return weights.size(); }

    std::size_t param_count() const {
        std::size_t p = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) p += weights[l].size() + biases[l].size();
        return p;
    }
};

// Table of experiment architectures (hidden layer widths between the fixed
// 45-feature input and 19-class output).
inline std::vector<std::size_t> model_arch(const std::string& name) {
    if (name == "model1") return {45, 10, 19};
    if (name == "model2") return {45, 10, 20, 19};
    if (name == "model3") return {45, 10, 20, 15, 19};
    if (name == "model4") return {45, 15, 20, 30, 20, 19};
    if (name == "model5") return {45, 20, 30, 40, 20, 10, 19};
    throw std::invalid_argument("unknown model architecture: " + name);
}

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;

    std::size_t size() const { return features.size(); }
    void push(std::vector<double> x, int label) {
        features.push_back(std::move(x));
        labels.push_back(label);
    }
};

struct ClientDataset {
    Dataset data;
    std::size_t ordinal = 0;
};

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 10;
    double learning_rate = 0.01;
    u64 seed = 0;
};

// ---- flatten / unflatten ----
// Traversal order: layer 1 weights row-major, layer 1 biases, layer 2
// weights, ... Identical across all parties; the aggregation circuit and the
// hash chain both consume this order.

inline FlatWeights flatten(const MlpModel& m) {
    FlatWeights out;
    out.reserve(m.param_count());
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        out.insert(out.end(), m.weights[l].begin(), m.weights[l].end());
        out.insert(out.end(), m.biases[l].begin(), m.biases[l].end());
    }
    return out;
}

inline MlpModel unflatten(const FlatWeights& flat, std::vector<std::size_t> layer_sizes) {
    MlpModel m = MlpModel::zeros(std::move(layer_sizes));
    if (flat.size() != m.param_count())
        throw std::invalid_argument("unflatten: expected " + std::to_string(m.param_count()) +
                                    " parameters, got " + std::to_string(flat.size()));
    std::size_t pos = 0;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        std::copy(flat.begin() + pos, flat.begin() + pos + m.weights[l].size(),
                  m.weights[l].begin());
        pos += m.weights[l].size();
        std::copy(flat.begin() + pos, flat.begin() + pos + m.biases[l].size(),
                  m.biases[l].begin());
        pos += m.biases[l].size();
    }
    return m;
}

// ---- forward / backward ----

namespace detail {

struct ForwardTrace {
    std::vector<std::vector<double>> activations; // [0] = input, per layer post-ReLU
    std::vector<double> probs;                    // softmax output
};

inline ForwardTrace forward(const MlpModel& m, std::span<const double> x) {
    ForwardTrace t;
    t.activations.emplace_back(x.begin(), x.end());
    for (std::size_t l = 0; l < m.num_layers(); ++l) {
        const auto& prev = t.activations.back();
        std::size_t n_in = m.layer_sizes[l];
        std::size_t n_out = m.layer_sizes[l + 1];
        std::vector<double> z(n_out);
        for (std::size_t o = 0; o < n_out; ++o) {
            double acc = m.biases[l][o];
            const double* row = &m.weights[l][o * n_in];
            for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * prev[i];
            z[o] = acc;
        }
        if (l + 1 < m.num_layers()) {
            for (auto& v : z) v = v > 0.0 ? v : 0.0;
            t.activations.push_back(std::move(z));
        } else {
            double zmax = z[0];
            for (double v : z) zmax = std::max(zmax, v);
            double sum = 0.0;
            for (auto& v : z) {
                v = std::exp(v - zmax);
                sum += v;
            }
            for (auto& v : z) v /= sum;
            t.probs = std::move(z);
        }
    }
    return t;
}

// Adds d(cross-entropy)/d(params) for one sample into grad_w/grad_b.
inline void backward(const MlpModel& m, const ForwardTrace& t, int label,
                     std::vector<std::vector<double>>& grad_w,
                     std::vector<std::vector<double>>& grad_b) {
    std::vector<double> delta = t.probs; // softmax - onehot
    delta[(std::size_t)label] -= 1.0;
    for (std::size_t l = m.num_layers(); l-- > 0;) {
        std::size_t n_in = m.layer_sizes[l];
        std::size_t n_out = m.layer_sizes[l + 1];
        const auto& a_prev = t.activations[l];
        for (std::size_t o = 0; o < n_out; ++o) {
            double d = delta[o];
            grad_b[l][o] += d;
            double* grow = &grad_w[l][o * n_in];
            for (std::size_t i = 0; i < n_in; ++i) grow[i] += d * a_prev[i];
        }
        if (l == 0) break;
        std::vector<double> next(n_in, 0.0);
        for (std::size_t o = 0; o < n_out; ++o) {
            double d = delta[o];
            const double* row = &m.weights[l][o * n_in];
            for (std::size_t i = 0; i < n_in; ++i) next[i] += d * row[i];
        }
        // ReLU mask of the producing layer
        for (std::size_t i = 0; i < n_in; ++i)
            if (t.activations[l][i] <= 0.0) next[i] = 0.0;
        delta = std::move(next);
    }
}

} // namespace detail

inline int predict(const MlpModel& m, std::span<const double> x) {
    auto t = detail::forward(m, x);
    return (int)(std::max_element(t.probs.begin(), t.probs.end()) - t.probs.begin());
}

inline double evaluate_accuracy(const MlpModel& m, const Dataset& ds) {
    if (ds.size() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (predict(m, ds.features[i]) == ds.labels[i]) ++hits;
    return (double)hits / (double)ds.size();
}

inline double mean_cross_entropy(const MlpModel& m, const Dataset& ds) {
    double loss = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto t = detail::forward(m, ds.features[i]);
        loss += -std::log(std::max(t.probs[(std::size_t)ds.labels[i]], 1e-300));
    }
    return loss / (double)ds.size();
}

// Local update: E epochs of minibatch SGD (per-epoch seeded shuffle, last
// batch possibly short); returns the flattened trained weights.
inline FlatWeights client_update(const MlpModel& start, const ClientDataset& client,
                                 const TrainConfig& cfg) {
    if (client.data.size() == 0) throw std::invalid_argument("client_update: empty dataset");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("client_update: epochs and batch size must be positive");
    if (cfg.learning_rate < 0.0)
        throw std::invalid_argument("client_update: negative learning rate");

    MlpModel m = start;
    std::vector<std::size_t> order(client.data.size());
    std::iota(order.begin(), order.end(), 0);
    auto grad_w = m.weights;
    auto grad_b = m.biases;

    SplitMix64 rng(cfg.seed);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        for (std::size_t base = 0; base < order.size(); base += cfg.batch_size) {
            std::size_t count = std::min(cfg.batch_size, order.size() - base);
            for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t s = 0; s < count; ++s) {
                std::size_t idx = order[base + s];
                auto trace = detail::forward(m, client.data.features[idx]);
                detail::backward(m, trace, client.data.labels[idx], grad_w, grad_b);
            }
            double step = cfg.learning_rate / (double)count;
            for (std::size_t l = 0; l < m.num_layers(); ++l) {
                for (std::size_t i = 0; i < m.weights[l].size(); ++i)
                    m.weights[l][i] -= step * grad_w[l][i];
                for (std::size_t i = 0; i < m.biases[l].size(); ++i)
                    m.biases[l][i] -= step * grad_b[l][i];
            }
        }
    }
    return flatten(m);
}

// Weighted average with N = sum n_k.
inline FlatWeights fed_avg(const std::vector<FlatWeights>& weights,
                           const std::vector<std::size_t>& sizes) {
    if (weights.empty() || weights.size() != sizes.size())
        throw std::invalid_argument("fed_avg: need matching nonempty weight/size lists");
    std::size_t p = weights[0].size();
    double total = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k].size() != p) throw std::invalid_argument("fed_avg: vector length mismatch");
        if (sizes[k] == 0) throw std::invalid_argument("fed_avg: client size must be positive");
        total += (double)sizes[k];
    }
    FlatWeights out(p, 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        double coeff = (double)sizes[k] / total;
        for (std::size_t j = 0; j < p; ++j) out[j] += coeff * weights[k][j];
    }
    return out;
}

// ---- fixed-point codec ----

struct FixedPointCodec {
    double scale = 65536.0;               // 2^16
    u64 offset = (u64(1) << 40);          // 2^40

    u64 encode_one(double w, std::size_t index) const {
        if (!(std::abs(w) < 16777216.0) || !std::isfinite(w))
            throw std::range_error("encode: |w| >= 2^24 at index " + std::to_string(index));
        long long scaled = (long long)std::floor(w * scale + 0.5); // round half up
        return (u64)((long long)offset + scaled);
    }

    double decode_one(u64 e) const { return (double)((long long)e - (long long)offset) / scale; }
};

inline std::vector<u64> encode_weights(const FlatWeights& flat, const FixedPointCodec& codec) {
    std::vector<u64> out;
    out.reserve(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) out.push_back(codec.encode_one(flat[i], i));
    return out;
}

inline FlatWeights decode_weights(std::span<const u64> enc, const FixedPointCodec& codec) {
    FlatWeights out;
    out.reserve(enc.size());
    for (u64 e : enc) out.push_back(codec.decode_one(e));
    return out;
}

// m = max(floor(C*K), 1) distinct ordinals via a seeded shuffle prefix.
inline std::vector<std::size_t> select_clients(std::size_t total, double fraction, u64 seed) {
    if (total == 0) throw std::invalid_argument("select_clients: no clients");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("select_clients: fraction must be in (0, 1]");
    std::size_t m = std::max<std::size_t>((std::size_t)std::floor(fraction * (double)total), 1);
    std::vector<std::size_t> ids(total);
    std::iota(ids.begin(), ids.end(), 0);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + rng.next_below(total - i);
        std::swap(ids[i], ids[j]);
    }
    ids.resize(m);
    return ids;
}

} // namespace zkdfl::fl
