// models.hpp
// The seven learning configurations, assembled behind one
// forward/backward/step contract:
//
//   VQC                  trainable angles, fixed Pauli-Z readout
//   VQC_LearnObs         trainable angles + directly trainable observable
//   VQC_LearnObs_SepOpt  as above, observable on its own Adam optimizer
//   VQC_LearnObsOnly     frozen random angles, trainable observable
//   FWP_CircuitParams    linear controller emits the angles per input
//   FWP_Observable       frozen angles, linear controller emits the observable
//   FWP_Both             encoder-decoder emits both angles and observable
//
// Backprop is hand-wired: BCE' * sigmoid' feeds the observable branch through
// expectation_grad_params and the circuit branch through the adjoint angle
// gradient (equal to parameter-shift), then linear_backward into whichever
// controller emitted the tensor.

#pragma once

#include <array>
#include <cstddef>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpm/gradients.hpp"
#include "qpm/neural.hpp"
#include "qpm/observable.hpp"
#include "qpm/prng.hpp"
#include "qpm/state.hpp"

namespace qpm {

enum class VariantKind {
    VQC,
    VQC_LearnObs,
    VQC_LearnObs_SepOpt,
    VQC_LearnObsOnly,
    FWP_CircuitParams,
    FWP_Observable,
    FWP_Both,
};

inline constexpr std::array<VariantKind, 7> kAllVariants{
    VariantKind::VQC,
    VariantKind::VQC_LearnObs,
    VariantKind::VQC_LearnObs_SepOpt,
    VariantKind::VQC_LearnObsOnly,
    VariantKind::FWP_CircuitParams,
    VariantKind::FWP_Observable,
    VariantKind::FWP_Both,
};

inline const char* variant_name(VariantKind k) {
    switch (k) {
    case VariantKind::VQC:
        return "VQC";
    case VariantKind::VQC_LearnObs:
        return "VQC_LearnObs";
    case VariantKind::VQC_LearnObs_SepOpt:
        return "VQC_LearnObs_SepOpt";
    case VariantKind::VQC_LearnObsOnly:
        return "VQC_LearnObsOnly";
    case VariantKind::FWP_CircuitParams:
        return "FWP_CircuitParams";
    case VariantKind::FWP_Observable:
        return "FWP_Observable";
    default:
        return "FWP_Both";
    }
}

inline VariantKind variant_from_name(const std::string& name) {
    for (const VariantKind k : kAllVariants) {
        if (name == variant_name(k)) {
            return k;
        }
    }
    std::string all;
    for (const VariantKind k : kAllVariants) {
        all += std::string(all.empty() ? "" : ", ") + variant_name(k);
    }
    throw std::invalid_argument("unknown variant '" + name +
                                "'; valid kinds: " + all);
}

// Structural capabilities per kind.
inline bool has_static_theta(VariantKind k) {
    return k != VariantKind::FWP_CircuitParams && k != VariantKind::FWP_Both;
}
inline bool theta_trainable(VariantKind k) {
    return k == VariantKind::VQC || k == VariantKind::VQC_LearnObs ||
           k == VariantKind::VQC_LearnObs_SepOpt;
}
inline bool has_direct_obs(VariantKind k) {
    return k == VariantKind::VQC_LearnObs ||
           k == VariantKind::VQC_LearnObs_SepOpt ||
           k == VariantKind::VQC_LearnObsOnly;
}
inline bool uses_pauli_z(VariantKind k) {
    return k == VariantKind::VQC || k == VariantKind::FWP_CircuitParams;
}

template <typename Scalar = double>
struct ModelVariant {
    VariantKind kind = VariantKind::VQC;
    AnsatzConfig cfg;
    int feature_dim = 0;
    int readout_qubit = 0;
    int latent_dim = 16;

    CircuitParams<Scalar> theta;  // static (trainable or frozen) angles
    ObservableParams<Scalar> obs; // directly trained observable

    LinearLayer<Scalar> ctrl_theta; // FWP_CircuitParams: d -> 3nM
    LinearLayer<Scalar> ctrl_obs;   // FWP_Observable: d -> N^2
    LinearLayer<Scalar> encoder;    // FWP_Both: d -> latent, tanh
    LinearLayer<Scalar> head_theta; // FWP_Both: latent -> 3nM
    LinearLayer<Scalar> head_obs;   // FWP_Both: latent -> N^2

    OptimizerState<Scalar> opt_theta;
    OptimizerState<Scalar> opt_obs;
    OptimizerState<Scalar> opt_ctrl_theta_w, opt_ctrl_theta_b;
    OptimizerState<Scalar> opt_ctrl_obs_w, opt_ctrl_obs_b;
    OptimizerState<Scalar> opt_encoder_w, opt_encoder_b;
    OptimizerState<Scalar> opt_head_theta_w, opt_head_theta_b;
    OptimizerState<Scalar> opt_head_obs_w, opt_head_obs_b;
};

// Initialization draw order, fixed for reproducibility: angles (when the kind
// keeps a static tensor, Uniform(0, 2pi) each), then direct observable values
// (Normal(0, 0.1) each), then controller layers (weights before bias) in the
// order ctrl_theta, ctrl_obs, encoder, head_theta, head_obs.
template <typename Scalar = double>
ModelVariant<Scalar> make_model(VariantKind kind, const AnsatzConfig& cfg,
                                int feature_dim, Prng& rng,
                                int latent_dim = 16,
                                Scalar lr_theta = Scalar{0.01},
                                Scalar lr_obs = Scalar{0.1},
                                Scalar lr_ctrl = Scalar{0.01}) {
    if (feature_dim < 1) {
        throw std::invalid_argument("make_model: feature_dim must be positive");
    }
    if (cfg.n_qubits < 1 || cfg.n_qubits > kMaxQubits || cfg.depth < 1) {
        throw std::invalid_argument("make_model: bad ansatz config");
    }
    if ((kind == VariantKind::FWP_Observable || kind == VariantKind::FWP_Both) &&
        cfg.n_qubits > 10) {
        std::cerr << "warning: " << variant_name(kind) << " at "
                  << cfg.n_qubits
                  << " qubits stores controller rows of 2^(2n) reals; expect "
                     "heavy memory use\n";
    }
    ModelVariant<Scalar> m;
    m.kind = kind;
    m.cfg = cfg;
    m.feature_dim = feature_dim;
    m.latent_dim = latent_dim;
    const int n_angles = cfg.angle_count();
    const int n_obs = static_cast<int>(observable_param_count(cfg.n_qubits));
    const Scalar two_pi = Scalar{2} * std::numbers::pi_v<Scalar>;

    if (has_static_theta(kind)) {
        m.theta.angles.resize(n_angles);
        for (auto& a : m.theta.angles) {
            a = static_cast<Scalar>(rng.uniform(0.0, two_pi));
        }
    }
    if (has_direct_obs(kind)) {
        m.obs.n_qubits = cfg.n_qubits;
        m.obs.values.resize(n_obs);
        for (auto& v : m.obs.values) {
            v = static_cast<Scalar>(rng.normal(0.0, 0.1));
        }
    }
    if (kind == VariantKind::FWP_CircuitParams) {
        m.ctrl_theta = init_layer<Scalar>(feature_dim, n_angles, rng);
    }
    if (kind == VariantKind::FWP_Observable) {
        m.ctrl_obs = init_layer<Scalar>(feature_dim, n_obs, rng);
    }
    if (kind == VariantKind::FWP_Both) {
        m.encoder = init_layer<Scalar>(feature_dim, latent_dim, rng);
        m.head_theta = init_layer<Scalar>(latent_dim, n_angles, rng);
        m.head_obs = init_layer<Scalar>(latent_dim, n_obs, rng);
    }

    m.opt_theta = OptimizerState<Scalar>::rmsprop(lr_theta);
    m.opt_obs = kind == VariantKind::VQC_LearnObs_SepOpt
                    ? OptimizerState<Scalar>::adam(lr_obs)
                    : OptimizerState<Scalar>::rmsprop(lr_obs);
    for (auto* opt :
         {&m.opt_ctrl_theta_w, &m.opt_ctrl_theta_b, &m.opt_ctrl_obs_w,
          &m.opt_ctrl_obs_b, &m.opt_encoder_w, &m.opt_encoder_b,
          &m.opt_head_theta_w, &m.opt_head_theta_b, &m.opt_head_obs_w,
          &m.opt_head_obs_b}) {
        *opt = OptimizerState<Scalar>::rmsprop(lr_ctrl);
    }
    return m;
}

template <typename Scalar = double>
struct ForwardCache {
    VariantKind kind = VariantKind::VQC;
    std::vector<Scalar> x;
    std::vector<Scalar> latent; // FWP_Both, post-tanh
    CircuitParams<Scalar> theta_eff;
    ObservableParams<Scalar> obs_eff; // unused for Pauli-Z kinds
    StateVector<Scalar> psi;
    Scalar e{};
    Scalar p{};
};

template <typename Scalar>
std::pair<Scalar, ForwardCache<Scalar>> model_forward(
    const ModelVariant<Scalar>& m, const std::vector<Scalar>& x) {
    if (static_cast<int>(x.size()) != m.feature_dim) {
        throw std::invalid_argument("model_forward: feature dim mismatch");
    }
    ForwardCache<Scalar> cache;
    cache.kind = m.kind;
    cache.x = x;

    switch (m.kind) {
    case VariantKind::FWP_CircuitParams:
        cache.theta_eff.angles = linear_forward(m.ctrl_theta, x);
        break;
    case VariantKind::FWP_Both:
        cache.latent = tanh_forward(linear_forward(m.encoder, x));
        cache.theta_eff.angles = linear_forward(m.head_theta, cache.latent);
        break;
    default:
        cache.theta_eff = m.theta;
        break;
    }
    cache.psi = forward_state(x, cache.theta_eff, m.cfg);

    if (uses_pauli_z(m.kind)) {
        cache.e = pauli_z_expectation(cache.psi, m.readout_qubit);
    } else {
        cache.obs_eff.n_qubits = m.cfg.n_qubits;
        if (has_direct_obs(m.kind)) {
            cache.obs_eff = m.obs;
        } else if (m.kind == VariantKind::FWP_Observable) {
            cache.obs_eff.values = linear_forward(m.ctrl_obs, x);
        } else { // FWP_Both
            cache.obs_eff.values = linear_forward(m.head_obs, cache.latent);
        }
        cache.e = expectation(cache.psi, hermitian_from_params(cache.obs_eff));
    }
    cache.p = sigmoid(cache.e);
    return {cache.p, std::move(cache)};
}

// One tensor of gradients per trainable tensor of the variant; absent tensors
// stay empty.
template <typename Scalar = double>
struct GradientSet {
    std::vector<Scalar> theta;
    std::vector<Scalar> obs;
    std::vector<Scalar> ctrl_theta_w, ctrl_theta_b;
    std::vector<Scalar> ctrl_obs_w, ctrl_obs_b;
    std::vector<Scalar> encoder_w, encoder_b;
    std::vector<Scalar> head_theta_w, head_theta_b;
    std::vector<Scalar> head_obs_w, head_obs_b;
};

namespace detail {

template <typename Scalar>
void add_into(std::vector<Scalar>& into, const std::vector<Scalar>& from,
              const char* what) {
    if (from.empty()) {
        return;
    }
    if (into.empty()) {
        into = from;
        return;
    }
    if (into.size() != from.size()) {
        throw std::invalid_argument(std::string("accumulate_gradients: ") +
                                    what + " shape mismatch");
    }
    for (std::size_t i = 0; i < into.size(); ++i) {
        into[i] += from[i];
    }
}

} // namespace detail

template <typename Scalar>
void accumulate_gradients(GradientSet<Scalar>& into,
                          const GradientSet<Scalar>& g) {
    detail::add_into(into.theta, g.theta, "theta");
    detail::add_into(into.obs, g.obs, "obs");
    detail::add_into(into.ctrl_theta_w, g.ctrl_theta_w, "ctrl_theta_w");
    detail::add_into(into.ctrl_theta_b, g.ctrl_theta_b, "ctrl_theta_b");
    detail::add_into(into.ctrl_obs_w, g.ctrl_obs_w, "ctrl_obs_w");
    detail::add_into(into.ctrl_obs_b, g.ctrl_obs_b, "ctrl_obs_b");
    detail::add_into(into.encoder_w, g.encoder_w, "encoder_w");
    detail::add_into(into.encoder_b, g.encoder_b, "encoder_b");
    detail::add_into(into.head_theta_w, g.head_theta_w, "head_theta_w");
    detail::add_into(into.head_theta_b, g.head_theta_b, "head_theta_b");
    detail::add_into(into.head_obs_w, g.head_obs_w, "head_obs_w");
    detail::add_into(into.head_obs_b, g.head_obs_b, "head_obs_b");
}

// Accumulating backward pass: adds this sample's gradients into `accum`
// (tensors are sized on first use). The training loop calls this directly so
// a minibatch never materializes per-sample copies of the big controller
// gradients.
template <typename Scalar>
void model_backward_into(const ModelVariant<Scalar>& m,
                         const ForwardCache<Scalar>& cache, int y,
                         GradientSet<Scalar>& accum) {
    if (cache.kind != m.kind ||
        static_cast<int>(cache.x.size()) != m.feature_dim ||
        static_cast<int>(cache.theta_eff.angles.size()) !=
            m.cfg.angle_count()) {
        throw std::invalid_argument(
            "model_backward: cache does not match this model");
    }
    const BceResult<Scalar> bce = bce_loss(cache.p, y);
    const Scalar dle = sigmoid_backward(cache.p, bce.dloss_dp); // dL/de

    std::vector<Scalar> latent_grad;
    const bool emits_obs = m.kind == VariantKind::FWP_Observable ||
                           m.kind == VariantKind::FWP_Both;
    if (has_direct_obs(m.kind) || emits_obs) {
        std::vector<Scalar> dldb = expectation_grad_params(cache.psi);
        for (auto& v : dldb) {
            v *= dle;
        }
        if (has_direct_obs(m.kind)) {
            detail::add_into(accum.obs, dldb, "obs");
        } else if (m.kind == VariantKind::FWP_Observable) {
            linear_backward_into(m.ctrl_obs, cache.x, dldb, accum.ctrl_obs_w,
                                 accum.ctrl_obs_b);
        } else {
            linear_backward_into(m.head_obs, cache.latent, dldb,
                                 accum.head_obs_w, accum.head_obs_b,
                                 &latent_grad);
        }
    }

    const bool emits_theta = m.kind == VariantKind::FWP_CircuitParams ||
                             m.kind == VariantKind::FWP_Both;
    if (theta_trainable(m.kind) || emits_theta) {
        GradientRequest<Scalar> req;
        req.x = cache.x;
        req.params = cache.theta_eff;
        req.cfg = m.cfg;
        req.measurement =
            uses_pauli_z(m.kind)
                ? Measurement<Scalar>::pauli_z(m.readout_qubit)
                : Measurement<Scalar>::hermitian(
                      hermitian_from_params(cache.obs_eff));
        std::vector<Scalar> dltheta = grad_expectation_adjoint(req);
        for (auto& v : dltheta) {
            v *= dle;
        }
        if (theta_trainable(m.kind)) {
            detail::add_into(accum.theta, dltheta, "theta");
        } else if (m.kind == VariantKind::FWP_CircuitParams) {
            linear_backward_into(m.ctrl_theta, cache.x, dltheta,
                                 accum.ctrl_theta_w, accum.ctrl_theta_b);
        } else {
            std::vector<Scalar> gx;
            linear_backward_into(m.head_theta, cache.latent, dltheta,
                                 accum.head_theta_w, accum.head_theta_b, &gx);
            detail::add_into(latent_grad, gx, "latent");
        }
    }

    if (m.kind == VariantKind::FWP_Both) {
        linear_backward_into(m.encoder, cache.x,
                             tanh_backward(cache.latent, latent_grad),
                             accum.encoder_w, accum.encoder_b);
    }
}

template <typename Scalar>
GradientSet<Scalar> model_backward(const ModelVariant<Scalar>& m,
                                   const ForwardCache<Scalar>& cache, int y) {
    GradientSet<Scalar> g;
    model_backward_into(m, cache, y, g);
    return g;
}

namespace detail {

template <typename Scalar>
void step_tensor(OptimizerState<Scalar>& opt, std::vector<Scalar>& params,
                 std::vector<Scalar>& grads, Scalar scale) {
    if (grads.empty()) {
        return;
    }
    for (auto& v : grads) {
        v *= scale;
    }
    optimizer_step(opt, params, grads);
}

} // namespace detail

// Applies one optimizer step per trainable tensor with the batch-averaged
// gradients (accumulated sums divided by batch_size).
template <typename Scalar>
void model_step(ModelVariant<Scalar>& m, GradientSet<Scalar> grads,
                int batch_size) {
    if (batch_size < 1) {
        throw std::invalid_argument("model_step: batch_size must be positive");
    }
    const Scalar scale = Scalar{1} / static_cast<Scalar>(batch_size);
    if (theta_trainable(m.kind)) {
        detail::step_tensor(m.opt_theta, m.theta.angles, grads.theta, scale);
    }
    if (has_direct_obs(m.kind)) {
        detail::step_tensor(m.opt_obs, m.obs.values, grads.obs, scale);
    }
    if (m.kind == VariantKind::FWP_CircuitParams) {
        detail::step_tensor(m.opt_ctrl_theta_w, m.ctrl_theta.weights,
                            grads.ctrl_theta_w, scale);
        detail::step_tensor(m.opt_ctrl_theta_b, m.ctrl_theta.bias,
                            grads.ctrl_theta_b, scale);
    }
    if (m.kind == VariantKind::FWP_Observable) {
        detail::step_tensor(m.opt_ctrl_obs_w, m.ctrl_obs.weights,
                            grads.ctrl_obs_w, scale);
        detail::step_tensor(m.opt_ctrl_obs_b, m.ctrl_obs.bias,
                            grads.ctrl_obs_b, scale);
    }
    if (m.kind == VariantKind::FWP_Both) {
        detail::step_tensor(m.opt_encoder_w, m.encoder.weights,
                            grads.encoder_w, scale);
        detail::step_tensor(m.opt_encoder_b, m.encoder.bias, grads.encoder_b,
                            scale);
        detail::step_tensor(m.opt_head_theta_w, m.head_theta.weights,
                            grads.head_theta_w, scale);
        detail::step_tensor(m.opt_head_theta_b, m.head_theta.bias,
                            grads.head_theta_b, scale);
        detail::step_tensor(m.opt_head_obs_w, m.head_obs.weights,
                            grads.head_obs_w, scale);
        detail::step_tensor(m.opt_head_obs_b, m.head_obs.bias,
                            grads.head_obs_b, scale);
    }
}

// Flat views over the variant's trainable raw parameters, in the same order
// the GradientSet flattens to. Used by the end-to-end finite-difference tests.
template <typename Scalar, typename Fn>
void for_each_trainable(ModelVariant<Scalar>& m, Fn&& fn) {
    if (theta_trainable(m.kind)) {
        fn(m.theta.angles);
    }
    if (has_direct_obs(m.kind)) {
        fn(m.obs.values);
    }
    if (m.kind == VariantKind::FWP_CircuitParams) {
        fn(m.ctrl_theta.weights);
        fn(m.ctrl_theta.bias);
    }
    if (m.kind == VariantKind::FWP_Observable) {
        fn(m.ctrl_obs.weights);
        fn(m.ctrl_obs.bias);
    }
    if (m.kind == VariantKind::FWP_Both) {
        fn(m.encoder.weights);
        fn(m.encoder.bias);
        fn(m.head_theta.weights);
        fn(m.head_theta.bias);
        fn(m.head_obs.weights);
        fn(m.head_obs.bias);
    }
}

template <typename Scalar>
std::vector<Scalar> flatten_trainable(const ModelVariant<Scalar>& m) {
    std::vector<Scalar> flat;
    for_each_trainable(const_cast<ModelVariant<Scalar>&>(m),
                       [&](const std::vector<Scalar>& t) {
                           flat.insert(flat.end(), t.begin(), t.end());
                       });
    return flat;
}

template <typename Scalar>
void assign_trainable(ModelVariant<Scalar>& m,
                      const std::vector<Scalar>& flat) {
    std::size_t pos = 0;
    for_each_trainable(m, [&](std::vector<Scalar>& t) {
        if (pos + t.size() > flat.size()) {
            throw std::invalid_argument("assign_trainable: flat vector too short");
        }
        std::copy(flat.begin() + pos, flat.begin() + pos + t.size(), t.begin());
        pos += t.size();
    });
    if (pos != flat.size()) {
        throw std::invalid_argument("assign_trainable: flat vector too long");
    }
}

template <typename Scalar>
std::vector<Scalar> flatten_gradients(const GradientSet<Scalar>& g) {
    std::vector<Scalar> flat;
    for (const auto* t :
         {&g.theta, &g.obs, &g.ctrl_theta_w, &g.ctrl_theta_b, &g.ctrl_obs_w,
          &g.ctrl_obs_b, &g.encoder_w, &g.encoder_b, &g.head_theta_w,
          &g.head_theta_b, &g.head_obs_w, &g.head_obs_b}) {
        flat.insert(flat.end(), t->begin(), t->end());
    }
    return flat;
}

} // namespace qpm
