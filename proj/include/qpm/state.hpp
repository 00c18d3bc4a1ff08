// state.hpp
// Dense little-endian statevector simulation of the n-qubit circuit: RY angle
// encoding followed by depth-M blocks of per-qubit RZ-RY-RZ rotations and a
// CNOT ring. Qubit 0 is the least-significant index bit.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpm {

// Dense N^2 observables dominate memory past this point.
inline constexpr int kMaxQubits = 14;

enum class Axis { X, Y, Z };

template <typename Scalar = double>
struct StateVector {
    int n_qubits = 0;
    std::vector<std::complex<Scalar>> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }

    Scalar norm_sq() const {
        Scalar s{0};
        for (const auto& a : amplitudes) {
            s += std::norm(a);
        }
        return s;
    }
};

struct AnsatzConfig {
    int n_qubits = 1;
    int depth = 1;

    int angle_count() const { return depth * n_qubits * 3; }
};

// Rotation angles in radians, ordered layer-major, then qubit-major, then
// (alpha, beta, gamma) for the RZ(gamma)·RY(beta)·RZ(alpha) block.
template <typename Scalar = double>
struct CircuitParams {
    std::vector<Scalar> angles;
};

template <typename Scalar>
std::complex<Scalar> inner_product(const StateVector<Scalar>& a,
                                   const StateVector<Scalar>& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    std::complex<Scalar> acc{0, 0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return acc;
}

template <typename Scalar>
Scalar fidelity(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
    return std::norm(inner_product(a, b));
}

namespace detail {

template <typename Scalar>
void apply_single_qubit(StateVector<Scalar>& state, int qubit,
                        const std::complex<Scalar> u00,
                        const std::complex<Scalar> u01,
                        const std::complex<Scalar> u10,
                        const std::complex<Scalar> u11) {
    auto* psi = state.amplitudes.data();
    const std::size_t n = state.dim();
    const std::size_t step = std::size_t{1} << qubit;
    const std::size_t block = step << 1;
    for (std::size_t base = 0; base < n; base += block) {
        for (std::size_t off = 0; off < step; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + step;
            const std::complex<Scalar> a = psi[i0];
            const std::complex<Scalar> b = psi[i1];
            psi[i0] = u00 * a + u01 * b;
            psi[i1] = u10 * a + u11 * b;
        }
    }
}

// exp(-i*angle*P/2) for P in {X, Y, Z}.
template <typename Scalar>
void rotate_inplace(StateVector<Scalar>& state, int qubit, Axis axis,
                    Scalar angle) {
    const Scalar c = std::cos(angle / Scalar{2});
    const Scalar s = std::sin(angle / Scalar{2});
    using C = std::complex<Scalar>;
    switch (axis) {
    case Axis::X:
        apply_single_qubit<Scalar>(state, qubit, C{c, 0}, C{0, -s}, C{0, -s},
                                   C{c, 0});
        break;
    case Axis::Y:
        apply_single_qubit<Scalar>(state, qubit, C{c, 0}, C{-s, 0}, C{s, 0},
                                   C{c, 0});
        break;
    case Axis::Z: {
        // Diagonal, so only a phase per half.
        auto* psi = state.amplitudes.data();
        const std::size_t n = state.dim();
        const std::size_t mask = std::size_t{1} << qubit;
        const C lo{c, -s};
        const C hi{c, s};
        for (std::size_t i = 0; i < n; ++i) {
            psi[i] *= (i & mask) ? hi : lo;
        }
        break;
    }
    }
}

template <typename Scalar>
void cnot_inplace(StateVector<Scalar>& state, int control, int target) {
    auto* psi = state.amplitudes.data();
    const std::size_t n = state.dim();
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < n; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(psi[i], psi[i | tmask]);
        }
    }
}

inline void check_qubit_index(int qubit, int n_qubits, const char* what) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw std::invalid_argument(std::string(what) + ": qubit index " +
                                    std::to_string(qubit) +
                                    " out of range for " +
                                    std::to_string(n_qubits) + " qubits");
    }
}

// One variational layer applied in place: RZ(alpha), RY(beta), RZ(gamma) per
// qubit, then the CNOT ring control i -> target (i+1) mod n (skipped at n=1).
template <typename Scalar>
void variational_layer_inplace(StateVector<Scalar>& state,
                               const Scalar* layer_angles) {
    const int n = state.n_qubits;
    for (int q = 0; q < n; ++q) {
        rotate_inplace(state, q, Axis::Z, layer_angles[3 * q + 0]);
        rotate_inplace(state, q, Axis::Y, layer_angles[3 * q + 1]);
        rotate_inplace(state, q, Axis::Z, layer_angles[3 * q + 2]);
    }
    if (n > 1) {
        for (int i = 0; i < n; ++i) {
            cnot_inplace(state, i, (i + 1) % n);
        }
    }
}

} // namespace detail

template <typename Scalar = double>
StateVector<Scalar> zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument(
            "zero_state: n_qubits must be in [1, " +
            std::to_string(kMaxQubits) + "], got " + std::to_string(n_qubits));
    }
    StateVector<Scalar> state;
    state.n_qubits = n_qubits;
    state.amplitudes.assign(std::size_t{1} << n_qubits, {0, 0});
    state.amplitudes[0] = {1, 0};
    return state;
}

template <typename Scalar>
StateVector<Scalar> apply_rotation(StateVector<Scalar> state, int qubit,
                                   Axis axis, Scalar angle) {
    detail::check_qubit_index(qubit, state.n_qubits, "apply_rotation");
    if (!std::isfinite(static_cast<double>(angle))) {
        throw std::invalid_argument("apply_rotation: angle must be finite");
    }
    detail::rotate_inplace(state, qubit, axis, angle);
    return state;
}

template <typename Scalar>
StateVector<Scalar> apply_cnot(StateVector<Scalar> state, int control,
                               int target) {
    detail::check_qubit_index(control, state.n_qubits, "apply_cnot");
    detail::check_qubit_index(target, state.n_qubits, "apply_cnot");
    if (control == target) {
        throw std::invalid_argument(
            "apply_cnot: control and target must differ");
    }
    detail::cnot_inplace(state, control, target);
    return state;
}

// RY(x[i mod d]) on qubit i, cycling features when d < n_qubits.
template <typename Scalar = double>
StateVector<Scalar> encode(const std::vector<Scalar>& x, int n_qubits) {
    if (x.empty()) {
        throw std::invalid_argument("encode: feature vector is empty");
    }
    for (const Scalar v : x) {
        if (!std::isfinite(static_cast<double>(v))) {
            throw std::invalid_argument("encode: non-finite feature value");
        }
    }
    StateVector<Scalar> state = zero_state<Scalar>(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        detail::rotate_inplace(state, q, Axis::Y, x[q % x.size()]);
    }
    return state;
}

template <typename Scalar>
StateVector<Scalar> apply_variational(StateVector<Scalar> state,
                                      const CircuitParams<Scalar>& params,
                                      const AnsatzConfig& cfg) {
    if (state.n_qubits != cfg.n_qubits) {
        throw std::invalid_argument("apply_variational: state/config mismatch");
    }
    if (static_cast<int>(params.angles.size()) != cfg.angle_count()) {
        throw std::invalid_argument(
            "apply_variational: expected " + std::to_string(cfg.angle_count()) +
            " angles, got " + std::to_string(params.angles.size()));
    }
    const int per_layer = cfg.n_qubits * 3;
    for (int layer = 0; layer < cfg.depth; ++layer) {
        detail::variational_layer_inplace(state,
                                          params.angles.data() +
                                              layer * per_layer);
    }
    return state;
}

// |Psi> = W(Theta) U(x) |0...0>
template <typename Scalar>
StateVector<Scalar> forward_state(const std::vector<Scalar>& x,
                                  const CircuitParams<Scalar>& params,
                                  const AnsatzConfig& cfg) {
    return apply_variational(encode(x, cfg.n_qubits), params, cfg);
}

} // namespace qpm
