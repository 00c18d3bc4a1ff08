// neural.hpp
// Hand-rolled dense layers, activations, binary cross-entropy, and the
// RMSProp/Adam optimizers. Backprop is wired explicitly by the model code;
// there is no graph machinery here.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qpm/prng.hpp"

namespace qpm {

template <typename Scalar = double>
struct LinearLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<Scalar> weights; // row-major out_dim x in_dim
    std::vector<Scalar> bias;    // out_dim

    Scalar& w(int row, int col) { return weights[row * in_dim + col]; }
    const Scalar& w(int row, int col) const {
        return weights[row * in_dim + col];
    }
};

// Weights then bias, i.i.d. Uniform(-1/sqrt(in_dim), +1/sqrt(in_dim)).
template <typename Scalar = double>
LinearLayer<Scalar> init_layer(int in_dim, int out_dim, Prng& rng) {
    if (in_dim < 1 || out_dim < 1) {
        throw std::invalid_argument("init_layer: dims must be positive");
    }
    const Scalar bound = Scalar{1} / std::sqrt(static_cast<Scalar>(in_dim));
    LinearLayer<Scalar> layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.weights.resize(static_cast<std::size_t>(in_dim) * out_dim);
    layer.bias.resize(out_dim);
    for (auto& w : layer.weights) {
        w = static_cast<Scalar>(rng.uniform(-bound, bound));
    }
    for (auto& b : layer.bias) {
        b = static_cast<Scalar>(rng.uniform(-bound, bound));
    }
    return layer;
}

template <typename Scalar>
std::vector<Scalar> linear_forward(const LinearLayer<Scalar>& layer,
                                   const std::vector<Scalar>& x) {
    if (static_cast<int>(x.size()) != layer.in_dim) {
        throw std::invalid_argument("linear_forward: input dim mismatch");
    }
    std::vector<Scalar> out(layer.out_dim);
    const Scalar* row = layer.weights.data();
    for (int i = 0; i < layer.out_dim; ++i, row += layer.in_dim) {
        Scalar acc = layer.bias[i];
        for (int j = 0; j < layer.in_dim; ++j) {
            acc += row[j] * x[j];
        }
        out[i] = acc;
    }
    return out;
}

template <typename Scalar = double>
struct LinearGrads {
    std::vector<Scalar> weights; // same layout as the layer
    std::vector<Scalar> bias;
    std::vector<Scalar> x; // gradient through to the input
};

// Accumulating form: adds outer(upstream, x) into grad_w and upstream into
// grad_b (sizing them on first use). grad_x, when requested, is overwritten
// with weights^T * upstream; passing nullptr skips that pass entirely, which
// matters when the weight matrix is huge (observable-emitting controllers).
template <typename Scalar>
void linear_backward_into(const LinearLayer<Scalar>& layer,
                          const std::vector<Scalar>& x,
                          const std::vector<Scalar>& upstream,
                          std::vector<Scalar>& grad_w,
                          std::vector<Scalar>& grad_b,
                          std::vector<Scalar>* grad_x = nullptr) {
    if (static_cast<int>(x.size()) != layer.in_dim ||
        static_cast<int>(upstream.size()) != layer.out_dim) {
        throw std::invalid_argument("linear_backward: dim mismatch");
    }
    if (grad_w.empty()) {
        grad_w.assign(layer.weights.size(), 0);
    }
    if (grad_b.empty()) {
        grad_b.assign(upstream.size(), 0);
    }
    if (grad_w.size() != layer.weights.size() ||
        grad_b.size() != upstream.size()) {
        throw std::invalid_argument("linear_backward: accumulator mismatch");
    }
    if (grad_x) {
        grad_x->assign(layer.in_dim, 0);
    }
    Scalar* wrow = grad_w.data();
    const Scalar* row = layer.weights.data();
    for (int i = 0; i < layer.out_dim; ++i) {
        const Scalar u = upstream[i];
        grad_b[i] += u;
        for (int j = 0; j < layer.in_dim; ++j) {
            wrow[j] += u * x[j];
        }
        if (grad_x) {
            for (int j = 0; j < layer.in_dim; ++j) {
                (*grad_x)[j] += row[j] * u;
            }
        }
        wrow += layer.in_dim;
        row += layer.in_dim;
    }
}

template <typename Scalar>
LinearGrads<Scalar> linear_backward(const LinearLayer<Scalar>& layer,
                                    const std::vector<Scalar>& x,
                                    const std::vector<Scalar>& upstream) {
    LinearGrads<Scalar> g;
    linear_backward_into(layer, x, upstream, g.weights, g.bias, &g.x);
    return g;
}

template <typename Scalar>
std::vector<Scalar> tanh_forward(const std::vector<Scalar>& z) {
    std::vector<Scalar> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::tanh(z[i]);
    }
    return out;
}

// Takes the forward output t = tanh(z); tanh'(z) = 1 - t^2.
template <typename Scalar>
std::vector<Scalar> tanh_backward(const std::vector<Scalar>& t,
                                  const std::vector<Scalar>& upstream) {
    if (t.size() != upstream.size()) {
        throw std::invalid_argument("tanh_backward: dim mismatch");
    }
    std::vector<Scalar> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = upstream[i] * (Scalar{1} - t[i] * t[i]);
    }
    return out;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
    if (z >= Scalar{0}) {
        return Scalar{1} / (Scalar{1} + std::exp(-z));
    }
    const Scalar e = std::exp(z);
    return e / (Scalar{1} + e);
}

// Takes the forward output p = sigmoid(z); sigma'(z) = p(1 - p).
template <typename Scalar>
Scalar sigmoid_backward(Scalar p, Scalar upstream) {
    return upstream * p * (Scalar{1} - p);
}

inline constexpr double kProbClamp = 1e-7;

template <typename Scalar = double>
struct BceResult {
    Scalar loss;
    Scalar dloss_dp; // w.r.t. the clamped probability
};

template <typename Scalar>
BceResult<Scalar> bce_loss(Scalar p, int y) {
    if (y != 0 && y != 1) {
        throw std::invalid_argument("bce_loss: label must be 0 or 1");
    }
    const Scalar lo = static_cast<Scalar>(kProbClamp);
    const Scalar pc = std::clamp(p, lo, Scalar{1} - lo);
    const Scalar yf = static_cast<Scalar>(y);
    BceResult<Scalar> r;
    r.loss = -(yf * std::log(pc) + (Scalar{1} - yf) * std::log(Scalar{1} - pc));
    r.dloss_dp = (pc - yf) / (pc * (Scalar{1} - pc));
    return r;
}

enum class OptimizerKind { RMSProp, Adam };

template <typename Scalar = double>
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::RMSProp;
    Scalar learning_rate{0.01};
    Scalar decay{0.9};  // RMSProp
    Scalar beta1{0.9};  // Adam
    Scalar beta2{0.999};
    Scalar epsilon{1e-8};
    long step_count = 0;   // Adam t
    std::vector<Scalar> v; // second moment
    std::vector<Scalar> m; // Adam first moment

    static OptimizerState rmsprop(Scalar lr) {
        OptimizerState s;
        s.kind = OptimizerKind::RMSProp;
        s.learning_rate = lr;
        return s;
    }

    static OptimizerState adam(Scalar lr) {
        OptimizerState s;
        s.kind = OptimizerKind::Adam;
        s.learning_rate = lr;
        return s;
    }
};

template <typename Scalar>
void optimizer_step(OptimizerState<Scalar>& st, std::vector<Scalar>& params,
                    const std::vector<Scalar>& grads) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("optimizer_step: shape mismatch");
    }
    if (st.v.empty()) {
        st.v.assign(params.size(), 0);
        if (st.kind == OptimizerKind::Adam) {
            st.m.assign(params.size(), 0);
        }
    } else if (st.v.size() != params.size()) {
        throw std::invalid_argument("optimizer_step: accumulator shape mismatch");
    }
    const Scalar lr = st.learning_rate;
    if (st.kind == OptimizerKind::RMSProp) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Scalar g = grads[i];
            st.v[i] = st.decay * st.v[i] + (Scalar{1} - st.decay) * g * g;
            params[i] -= lr * g / (std::sqrt(st.v[i]) + st.epsilon);
        }
        return;
    }
    ++st.step_count;
    const Scalar bc1 =
        Scalar{1} - std::pow(st.beta1, static_cast<Scalar>(st.step_count));
    const Scalar bc2 =
        Scalar{1} - std::pow(st.beta2, static_cast<Scalar>(st.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Scalar g = grads[i];
        st.m[i] = st.beta1 * st.m[i] + (Scalar{1} - st.beta1) * g;
        st.v[i] = st.beta2 * st.v[i] + (Scalar{1} - st.beta2) * g * g;
        const Scalar mhat = st.m[i] / bc1;
        const Scalar vhat = st.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + st.epsilon);
    }
}

} // namespace qpm
