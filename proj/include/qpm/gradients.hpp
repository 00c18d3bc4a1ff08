// gradients.hpp
// Exact angle gradients of circuit expectation values. Parameter-shift is the
// contractual method (two shifted evaluations per angle); an adjoint reverse
// sweep computes the same vector in one forward plus one backward pass and is
// what training uses. Also hosts the finite-difference oracle every gradient
// test compares against, and a dense Kronecker-product simulator oracle.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpm/observable.hpp"
#include "qpm/state.hpp"

namespace qpm {

template <typename Scalar = double>
struct Measurement {
    enum class Kind { PauliZ, Hermitian };

    Kind kind = Kind::PauliZ;
    int qubit = 0;                  // PauliZ readout
    HermitianMatrix<Scalar> matrix; // full observable

    static Measurement pauli_z(int qubit) {
        Measurement m;
        m.kind = Kind::PauliZ;
        m.qubit = qubit;
        return m;
    }

    static Measurement hermitian(HermitianMatrix<Scalar> b) {
        Measurement m;
        m.kind = Kind::Hermitian;
        m.matrix = std::move(b);
        return m;
    }
};

template <typename Scalar>
Scalar measure(const StateVector<Scalar>& state, const Measurement<Scalar>& m) {
    if (m.kind == Measurement<Scalar>::Kind::PauliZ) {
        return pauli_z_expectation(state, m.qubit);
    }
    return expectation(state, m.matrix);
}

template <typename Scalar = double>
struct GradientRequest {
    std::vector<Scalar> x;
    CircuitParams<Scalar> params;
    AnsatzConfig cfg;
    Measurement<Scalar> measurement;
};

namespace detail {

template <typename Scalar>
void check_request(const GradientRequest<Scalar>& req) {
    if (static_cast<int>(req.params.angles.size()) != req.cfg.angle_count()) {
        throw std::invalid_argument("gradient request: angle count mismatch");
    }
    if (req.measurement.kind == Measurement<Scalar>::Kind::Hermitian &&
        req.measurement.matrix.dim !=
            (std::size_t{1} << req.cfg.n_qubits)) {
        throw std::invalid_argument("gradient request: observable dim mismatch");
    }
}

} // namespace detail

// Parameter-shift rule: g_k = (E(theta_k + pi/2) - E(theta_k - pi/2)) / 2.
// Exact for the RX/RY/RZ generators used here.
template <typename Scalar>
std::vector<Scalar> grad_expectation_wrt_angles(
    const GradientRequest<Scalar>& req) {
    detail::check_request(req);
    const Scalar shift = std::numbers::pi_v<Scalar> / Scalar{2};
    const std::size_t count = req.params.angles.size();
    std::vector<Scalar> grad(count, 0);
    CircuitParams<Scalar> shifted = req.params;
    for (std::size_t k = 0; k < count; ++k) {
        const Scalar theta = req.params.angles[k];
        shifted.angles[k] = theta + shift;
        const Scalar plus =
            measure(forward_state(req.x, shifted, req.cfg), req.measurement);
        shifted.angles[k] = theta - shift;
        const Scalar minus =
            measure(forward_state(req.x, shifted, req.cfg), req.measurement);
        shifted.angles[k] = theta;
        grad[k] = (plus - minus) / Scalar{2};
    }
    return grad;
}

namespace detail {

// <lambda| P_qubit |psi> fused over the qubit's stride pattern.
template <typename Scalar>
std::complex<Scalar> pauli_bracket(const StateVector<Scalar>& lambda,
                                   const StateVector<Scalar>& psi, int qubit,
                                   Axis axis) {
    const auto* lam = lambda.amplitudes.data();
    const auto* phi = psi.amplitudes.data();
    const std::size_t n = psi.dim();
    const std::size_t step = std::size_t{1} << qubit;
    const std::size_t block = step << 1;
    std::complex<Scalar> acc{0, 0};
    if (axis == Axis::Z) {
        const std::size_t mask = step;
        for (std::size_t i = 0; i < n; ++i) {
            const std::complex<Scalar> term = std::conj(lam[i]) * phi[i];
            acc += (i & mask) ? -term : term;
        }
        return acc;
    }
    for (std::size_t base = 0; base < n; base += block) {
        for (std::size_t off = 0; off < step; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + step;
            if (axis == Axis::X) {
                acc += std::conj(lam[i0]) * phi[i1] +
                       std::conj(lam[i1]) * phi[i0];
            } else { // Y = [[0, -i], [i, 0]]
                acc += std::complex<Scalar>{0, 1} *
                       (std::conj(lam[i1]) * phi[i0] -
                        std::conj(lam[i0]) * phi[i1]);
            }
        }
    }
    return acc;
}

template <typename Scalar>
void apply_measurement_matvec(const Measurement<Scalar>& m,
                              const StateVector<Scalar>& psi,
                              StateVector<Scalar>& out) {
    out.n_qubits = psi.n_qubits;
    if (m.kind == Measurement<Scalar>::Kind::PauliZ) {
        out.amplitudes = psi.amplitudes;
        const std::size_t mask = std::size_t{1} << m.qubit;
        for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
            if (i & mask) {
                out.amplitudes[i] = -out.amplitudes[i];
            }
        }
        return;
    }
    hermitian_matvec(m.matrix, psi.amplitudes, out.amplitudes);
}

} // namespace detail

// Adjoint reverse sweep: one forward pass, then walk the gates backward while
// undoing them on both |psi> and |lambda> = (later gates)^dagger B |psi_final>.
// For each rotation exp(-i*theta*P/2) the gradient is Im(<lambda|P|psi>),
// which equals the parameter-shift value exactly (up to rounding).
template <typename Scalar>
std::vector<Scalar> grad_expectation_adjoint(
    const GradientRequest<Scalar>& req) {
    detail::check_request(req);
    const int n = req.cfg.n_qubits;
    const int per_layer = n * 3;
    StateVector<Scalar> psi = forward_state(req.x, req.params, req.cfg);
    StateVector<Scalar> lambda;
    detail::apply_measurement_matvec(req.measurement, psi, lambda);

    std::vector<Scalar> grad(req.params.angles.size(), 0);
    const Scalar* angles = req.params.angles.data();
    for (int layer = req.cfg.depth - 1; layer >= 0; --layer) {
        if (n > 1) {
            for (int i = n - 1; i >= 0; --i) {
                detail::cnot_inplace(psi, i, (i + 1) % n);
                detail::cnot_inplace(lambda, i, (i + 1) % n);
            }
        }
        const Scalar* block = angles + layer * per_layer;
        for (int q = n - 1; q >= 0; --q) {
            const Axis order[3] = {Axis::Z, Axis::Y, Axis::Z};
            for (int g = 2; g >= 0; --g) {
                const std::size_t k = layer * per_layer + 3 * q + g;
                grad[k] = detail::pauli_bracket(lambda, psi, q, order[g]).imag();
                detail::rotate_inplace(psi, q, order[g], -block[3 * q + g]);
                detail::rotate_inplace(lambda, q, order[g], -block[3 * q + g]);
            }
        }
    }
    return grad;
}

// Central differences (f(p + h e_k) - f(p - h e_k)) / 2h per coordinate.
template <typename Scalar, typename F>
std::vector<Scalar> finite_difference(F&& f, const std::vector<Scalar>& p,
                                      Scalar step = Scalar{1e-5}) {
    if (!(step > Scalar{0})) {
        throw std::invalid_argument("finite_difference: step must be positive");
    }
    std::vector<Scalar> grad(p.size(), 0);
    std::vector<Scalar> probe = p;
    for (std::size_t k = 0; k < p.size(); ++k) {
        probe[k] = p[k] + step;
        const Scalar hi = f(probe);
        probe[k] = p[k] - step;
        const Scalar lo = f(probe);
        probe[k] = p[k];
        if (!std::isfinite(static_cast<double>(hi)) ||
            !std::isfinite(static_cast<double>(lo))) {
            throw std::runtime_error(
                "finite_difference: non-finite function value at coordinate " +
                std::to_string(k));
        }
        grad[k] = (hi - lo) / (Scalar{2} * step);
    }
    return grad;
}

namespace detail {

template <typename Scalar>
using DenseMatrix = std::vector<std::complex<Scalar>>; // row-major square

template <typename Scalar>
DenseMatrix<Scalar> dense_identity(std::size_t n) {
    DenseMatrix<Scalar> m(n * n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = {1, 0};
    }
    return m;
}

template <typename Scalar>
DenseMatrix<Scalar> dense_kron(const DenseMatrix<Scalar>& a, std::size_t na,
                               const DenseMatrix<Scalar>& b, std::size_t nb) {
    DenseMatrix<Scalar> out(na * nb * na * nb, {0, 0});
    const std::size_t n = na * nb;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < na; ++j) {
            const std::complex<Scalar> aij = a[i * na + j];
            for (std::size_t k = 0; k < nb; ++k) {
                for (std::size_t l = 0; l < nb; ++l) {
                    out[(i * nb + k) * n + (j * nb + l)] = aij * b[k * nb + l];
                }
            }
        }
    }
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> dense_matmul(const DenseMatrix<Scalar>& a,
                                 const DenseMatrix<Scalar>& b, std::size_t n) {
    DenseMatrix<Scalar> out(n * n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::complex<Scalar> aik = a[i * n + k];
            if (aik == std::complex<Scalar>{0, 0}) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> rotation_2x2(Axis axis, Scalar angle) {
    const Scalar c = std::cos(angle / Scalar{2});
    const Scalar s = std::sin(angle / Scalar{2});
    using C = std::complex<Scalar>;
    switch (axis) {
    case Axis::X:
        return {C{c, 0}, C{0, -s}, C{0, -s}, C{c, 0}};
    case Axis::Y:
        return {C{c, 0}, C{-s, 0}, C{s, 0}, C{c, 0}};
    default:
        return {C{c, -s}, C{0, 0}, C{0, 0}, C{c, s}};
    }
}

// Little-endian embedding: op on qubit k is I_(2^(n-1-k)) (x) U (x) I_(2^k).
template <typename Scalar>
DenseMatrix<Scalar> embed_single(const DenseMatrix<Scalar>& u, int qubit,
                                 int n_qubits) {
    const std::size_t lo = std::size_t{1} << qubit;
    const std::size_t hi = std::size_t{1} << (n_qubits - 1 - qubit);
    DenseMatrix<Scalar> m = dense_kron(u, 2, dense_identity<Scalar>(lo), lo);
    return dense_kron(dense_identity<Scalar>(hi), hi, m, 2 * lo);
}

template <typename Scalar>
DenseMatrix<Scalar> cnot_permutation(int control, int target, int n_qubits) {
    const std::size_t n = std::size_t{1} << n_qubits;
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    DenseMatrix<Scalar> m(n * n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t out = (i & cmask) ? (i ^ tmask) : i;
        m[out * n + i] = {1, 0};
    }
    return m;
}

} // namespace detail

// Full-unitary reference simulator: builds every gate as a 2^n x 2^n matrix
// via explicit Kronecker products and multiplies them in application order.
// Deliberately slow and structurally independent of the stride kernels.
template <typename Scalar>
StateVector<Scalar> dense_circuit_oracle(const std::vector<Scalar>& x,
                                         const CircuitParams<Scalar>& params,
                                         const AnsatzConfig& cfg) {
    if (cfg.n_qubits > 4) {
        throw std::invalid_argument("dense_circuit_oracle: capped at 4 qubits");
    }
    if (static_cast<int>(params.angles.size()) != cfg.angle_count()) {
        throw std::invalid_argument("dense_circuit_oracle: angle count mismatch");
    }
    if (x.empty()) {
        throw std::invalid_argument("dense_circuit_oracle: empty features");
    }
    const int n = cfg.n_qubits;
    const std::size_t dim = std::size_t{1} << n;
    auto total = detail::dense_identity<Scalar>(dim);
    auto push = [&](const detail::DenseMatrix<Scalar>& gate) {
        total = detail::dense_matmul(gate, total, dim);
    };
    for (int q = 0; q < n; ++q) {
        push(detail::embed_single(
            detail::rotation_2x2(Axis::Y, x[q % x.size()]), q, n));
    }
    for (int layer = 0; layer < cfg.depth; ++layer) {
        const Scalar* block = params.angles.data() + layer * n * 3;
        for (int q = 0; q < n; ++q) {
            push(detail::embed_single(
                detail::rotation_2x2(Axis::Z, block[3 * q + 0]), q, n));
            push(detail::embed_single(
                detail::rotation_2x2(Axis::Y, block[3 * q + 1]), q, n));
            push(detail::embed_single(
                detail::rotation_2x2(Axis::Z, block[3 * q + 2]), q, n));
        }
        if (n > 1) {
            for (int i = 0; i < n; ++i) {
                push(detail::cnot_permutation<Scalar>(i, (i + 1) % n, n));
            }
        }
    }
    StateVector<Scalar> state;
    state.n_qubits = n;
    state.amplitudes.assign(dim, {0, 0});
    for (std::size_t i = 0; i < dim; ++i) {
        state.amplitudes[i] = total[i * dim]; // column of |0...0>
    }
    return state;
}

} // namespace qpm
