// observable.hpp
// Hermitian observables parameterized by N^2 real numbers: N diagonal entries,
// then the upper-triangle real parts (row-major over i<j), then the matching
// imaginary parts. Provides expectation values, their analytic gradient in the
// parameter vector, and a Jacobi eigenvalue oracle for spectral bounds.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpm/state.hpp"

namespace qpm {

inline std::size_t observable_dim(int n_qubits) {
    return std::size_t{1} << n_qubits;
}

inline std::size_t observable_param_count(int n_qubits) {
    const std::size_t n = observable_dim(n_qubits);
    return n * n;
}

template <typename Scalar = double>
struct ObservableParams {
    int n_qubits = 0;
    std::vector<Scalar> values; // length N^2

    bool size_ok() const {
        return values.size() == observable_param_count(n_qubits);
    }
};

template <typename Scalar = double>
struct HermitianMatrix {
    std::size_t dim = 0;
    std::vector<std::complex<Scalar>> entries; // row-major dim x dim

    std::complex<Scalar>& at(std::size_t i, std::size_t j) {
        return entries[i * dim + j];
    }
    const std::complex<Scalar>& at(std::size_t i, std::size_t j) const {
        return entries[i * dim + j];
    }
};

namespace detail {

// Flat index of the (i, j) pair, i < j, in row-major upper-triangle order.
inline std::size_t pair_offset(std::size_t i, std::size_t j, std::size_t n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

} // namespace detail

template <typename Scalar>
HermitianMatrix<Scalar> hermitian_from_params(
    const ObservableParams<Scalar>& p) {
    if (!p.size_ok()) {
        throw std::invalid_argument(
            "hermitian_from_params: expected " +
            std::to_string(observable_param_count(p.n_qubits)) +
            " values, got " + std::to_string(p.values.size()));
    }
    const std::size_t n = observable_dim(p.n_qubits);
    const std::size_t pairs = n * (n - 1) / 2;
    HermitianMatrix<Scalar> m;
    m.dim = n;
    m.entries.assign(n * n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = {p.values[i], 0};
    }
    const Scalar* a = p.values.data() + n;
    const Scalar* c = a + pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t k = detail::pair_offset(i, j, n);
            m.at(i, j) = {a[k], c[k]};
            m.at(j, i) = {a[k], -c[k]};
        }
    }
    return m;
}

template <typename Scalar>
ObservableParams<Scalar> params_from_hermitian(
    const HermitianMatrix<Scalar>& m) {
    int n_qubits = 0;
    while (observable_dim(n_qubits) < m.dim) {
        ++n_qubits;
    }
    if (observable_dim(n_qubits) != m.dim) {
        throw std::invalid_argument(
            "params_from_hermitian: dim is not a power of two");
    }
    const std::size_t n = m.dim;
    const std::size_t pairs = n * (n - 1) / 2;
    ObservableParams<Scalar> p;
    p.n_qubits = n_qubits;
    p.values.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        p.values[i] = m.at(i, i).real();
    }
    Scalar* a = p.values.data() + n;
    Scalar* c = a + pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t k = detail::pair_offset(i, j, n);
            a[k] = m.at(i, j).real();
            c[k] = m.at(i, j).imag();
        }
    }
    return p;
}

// y = B * psi
template <typename Scalar>
void hermitian_matvec(const HermitianMatrix<Scalar>& b,
                      const std::vector<std::complex<Scalar>>& psi,
                      std::vector<std::complex<Scalar>>& out) {
    const std::size_t n = b.dim;
    out.assign(n, {0, 0});
    const std::complex<Scalar>* row = b.entries.data();
    for (std::size_t i = 0; i < n; ++i, row += n) {
        std::complex<Scalar> acc{0, 0};
        for (std::size_t j = 0; j < n; ++j) {
            acc += row[j] * psi[j];
        }
        out[i] = acc;
    }
}

inline constexpr double kExpectationImagTol = 1e-10;

template <typename Scalar>
Scalar expectation(const StateVector<Scalar>& state,
                   const HermitianMatrix<Scalar>& b) {
    if (state.dim() != b.dim) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    std::vector<std::complex<Scalar>> bpsi;
    hermitian_matvec(b, state.amplitudes, bpsi);
    std::complex<Scalar> acc{0, 0};
    for (std::size_t i = 0; i < b.dim; ++i) {
        acc += std::conj(state.amplitudes[i]) * bpsi[i];
    }
    if (std::abs(static_cast<double>(acc.imag())) >= kExpectationImagTol) {
        throw std::runtime_error(
            "expectation: imaginary residue " +
            std::to_string(static_cast<double>(acc.imag())) +
            " exceeds tolerance; observable is not Hermitian");
    }
    return acc.real();
}

// O(N) fast path for <Z_q>: signed sum of probabilities.
template <typename Scalar>
Scalar pauli_z_expectation(const StateVector<Scalar>& state, int qubit) {
    detail::check_qubit_index(qubit, state.n_qubits, "pauli_z_expectation");
    const std::size_t mask = std::size_t{1} << qubit;
    Scalar acc{0};
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const Scalar p = std::norm(state.amplitudes[i]);
        acc += (i & mask) ? -p : p;
    }
    return acc;
}

// d<B>/d(params) at fixed state, in ObservableParams order. The expectation is
// linear in the parameters, so this gradient is globally exact:
//   d/d d_ii = |psi_i|^2,  d/d a_ij = 2 Re(conj(psi_i) psi_j),
//   d/d c_ij = -2 Im(conj(psi_i) psi_j).
template <typename Scalar>
std::vector<Scalar> expectation_grad_params(const StateVector<Scalar>& state) {
    const std::size_t n = state.dim();
    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<Scalar> grad(n * n, 0);
    const std::complex<Scalar>* psi = state.amplitudes.data();
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = std::norm(psi[i]);
    }
    Scalar* a = grad.data() + n;
    Scalar* c = a + pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<Scalar> pi_conj = std::conj(psi[i]);
        std::size_t k = detail::pair_offset(i, i + 1, n);
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const std::complex<Scalar> z = pi_conj * psi[j];
            a[k] = Scalar{2} * z.real();
            c[k] = Scalar{-2} * z.imag();
        }
    }
    return grad;
}

// Extreme eigenvalues via cyclic Jacobi rotations. Test utility: dim <= 64.
template <typename Scalar>
std::pair<Scalar, Scalar> eigen_bounds(const HermitianMatrix<Scalar>& b) {
    constexpr double kOffTol = 1e-12;
    constexpr int kMaxSweeps = 100;
    if (b.dim > 64) {
        throw std::invalid_argument("eigen_bounds: dim capped at 64");
    }
    if (b.dim == 0) {
        throw std::invalid_argument("eigen_bounds: empty matrix");
    }
    const std::size_t n = b.dim;
    std::vector<std::complex<double>> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i) {
        a[i] = std::complex<double>(b.entries[i]);
    }
    auto at = [&](std::size_t i, std::size_t j) -> std::complex<double>& {
        return a[i * n + j];
    };

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off_max = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off_max = std::max(off_max, std::abs(at(p, q)));
            }
        }
        if (off_max < kOffTol) {
            double lo = at(0, 0).real();
            double hi = lo;
            for (std::size_t i = 1; i < n; ++i) {
                const double d = at(i, i).real();
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            return {static_cast<Scalar>(lo), static_cast<Scalar>(hi)};
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(at(p, q));
                if (r < kOffTol) {
                    continue;
                }
                // Phase-rotate column/row q so the pivot entry becomes real,
                // then a real Jacobi rotation annihilates it.
                const std::complex<double> phase = at(p, q) / r;
                for (std::size_t i = 0; i < n; ++i) {
                    at(i, q) *= std::conj(phase);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    at(q, i) *= phase;
                }
                const double app = at(p, p).real();
                const double aqq = at(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t =
                    (tau >= 0 ? 1.0 : -1.0) /
                    (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::complex<double> aip = at(i, p);
                    const std::complex<double> aiq = at(i, q);
                    at(i, p) = c * aip - s * aiq;
                    at(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const std::complex<double> api = at(p, i);
                    const std::complex<double> aqi = at(q, i);
                    at(p, i) = c * api - s * aqi;
                    at(q, i) = s * api + c * aqi;
                }
                at(p, q) = 0;
                at(q, p) = 0;
            }
        }
    }
    throw std::runtime_error("eigen_bounds: Jacobi did not converge");
}

} // namespace qpm
