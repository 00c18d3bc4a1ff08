// selftest.hpp
// Fast self-contained verification pass used by the `selftest` subcommand:
// spot checks of the PRNG, gate algebra, both gradient paths against finite
// differences, spectral containment, optimizer formulas, dataset anchors, and
// one end-to-end gradient check per model variant. Each check prints one
// ok/FAIL line; the whole pass runs in seconds.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qpm/data.hpp"
#include "qpm/gradients.hpp"
#include "qpm/models.hpp"
#include "qpm/neural.hpp"
#include "qpm/observable.hpp"
#include "qpm/prng.hpp"
#include "qpm/state.hpp"

namespace qpm {

// Haar-ish random normalized state: complex normal amplitudes, normalized.
inline StateVector<double> random_state(int n_qubits, Prng& rng) {
    StateVector<double> s;
    s.n_qubits = n_qubits;
    s.amplitudes.resize(std::size_t{1} << n_qubits);
    double norm_sq = 0;
    for (auto& a : s.amplitudes) {
        a = {rng.normal(), rng.normal()};
        norm_sq += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& a : s.amplitudes) {
        a *= inv;
    }
    return s;
}

inline ObservableParams<double> random_observable_params(int n_qubits,
                                                         Prng& rng) {
    ObservableParams<double> p;
    p.n_qubits = n_qubits;
    p.values.resize(observable_param_count(n_qubits));
    for (auto& v : p.values) {
        v = rng.uniform(-1.0, 1.0);
    }
    return p;
}

inline CircuitParams<double> random_circuit_params(const AnsatzConfig& cfg,
                                                   Prng& rng) {
    CircuitParams<double> p;
    p.angles.resize(cfg.angle_count());
    for (auto& a : p.angles) {
        a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return p;
}

inline std::vector<double> random_features(int d, Prng& rng) {
    std::vector<double> x(d);
    for (auto& v : x) {
        v = rng.uniform(-1.5, 1.5);
    }
    return x;
}

// Relative error with an absolute floor for near-zero references.
inline bool close_rel(double got, double want, double rel, double abs_floor) {
    const double diff = std::abs(got - want);
    if (diff <= abs_floor) {
        return true;
    }
    return diff <= rel * std::max(std::abs(got), std::abs(want));
}

namespace detail {

struct SelftestRunner {
    std::ostream& os;
    int failed = 0;
    int passed = 0;

    void check(const std::string& name, const std::function<bool()>& fn) {
        bool ok = false;
        std::string note;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        if (ok) {
            ++passed;
            os << "ok:   " << name << '\n';
        } else {
            ++failed;
            os << "FAIL: " << name << note << '\n';
        }
    }
};

} // namespace detail

inline bool run_selftest(std::ostream& os) {
    detail::SelftestRunner t{os};

    t.check("prng reproduces its reference stream", [] {
        Prng a(42, 54);
        Prng b(42, 54);
        if (a.next_u32() != 0xa15c02b7u) {
            return false;
        }
        for (int i = 0; i < 1000; ++i) {
            b.next_u32();
        }
        Prng c(42, 54);
        c.next_u32();
        return b.next_u32() != 0 && a.next_u32() == c.next_u32();
    });

    t.check("gates preserve norm and hit closed forms", [] {
        Prng rng(3, kStreamModel);
        auto s = apply_rotation(zero_state(1), 0, Axis::Y, std::numbers::pi);
        if (std::abs(std::abs(s.amplitudes[1]) - 1.0) > 1e-12) {
            return false;
        }
        AnsatzConfig cfg{3, 2};
        const auto psi = forward_state(random_features(3, rng),
                                       random_circuit_params(cfg, rng), cfg);
        return std::abs(psi.norm_sq() - 1.0) < 1e-9;
    });

    t.check("stride kernels match the dense Kronecker oracle", [] {
        Prng rng(11, kStreamModel);
        for (int n = 1; n <= 4; ++n) {
            AnsatzConfig cfg{n, 2};
            const auto x = random_features(2, rng);
            const auto params = random_circuit_params(cfg, rng);
            const auto fast = forward_state(x, params, cfg);
            const auto slow = dense_circuit_oracle(x, params, cfg);
            for (std::size_t i = 0; i < fast.dim(); ++i) {
                if (std::abs(fast.amplitudes[i] - slow.amplitudes[i]) > 1e-10) {
                    return false;
                }
            }
        }
        return true;
    });

    t.check("parameter-shift matches finite differences", [] {
        Prng rng(17, kStreamModel);
        for (int rep = 0; rep < 5; ++rep) {
            const int n = 1 + static_cast<int>(rng.next_below(3));
            GradientRequest<double> req;
            req.cfg = {n, 2};
            req.x = random_features(2, rng);
            req.params = random_circuit_params(req.cfg, rng);
            req.measurement = Measurement<double>::hermitian(
                hermitian_from_params(random_observable_params(n, rng)));
            const auto shift = grad_expectation_wrt_angles(req);
            auto f = [&](const std::vector<double>& angles) {
                CircuitParams<double> p{angles};
                return measure(forward_state(req.x, p, req.cfg),
                               req.measurement);
            };
            const auto fd = finite_difference(f, req.params.angles, 1e-5);
            for (std::size_t k = 0; k < fd.size(); ++k) {
                if (!close_rel(shift[k], fd[k], 1e-5, 1e-8)) {
                    return false;
                }
            }
        }
        return true;
    });

    t.check("adjoint sweep equals parameter-shift", [] {
        Prng rng(19, kStreamModel);
        for (int rep = 0; rep < 5; ++rep) {
            const int n = 1 + static_cast<int>(rng.next_below(3));
            GradientRequest<double> req;
            req.cfg = {n, 2};
            req.x = random_features(2, rng);
            req.params = random_circuit_params(req.cfg, rng);
            req.measurement =
                rep % 2 ? Measurement<double>::pauli_z(
                              static_cast<int>(rng.next_below(n)))
                        : Measurement<double>::hermitian(hermitian_from_params(
                              random_observable_params(n, rng)));
            const auto a = grad_expectation_adjoint(req);
            const auto b = grad_expectation_wrt_angles(req);
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (std::abs(a[k] - b[k]) > 1e-10) {
                    return false;
                }
            }
        }
        return true;
    });

    t.check("observable gradient matches finite differences", [] {
        Prng rng(23, kStreamModel);
        for (int rep = 0; rep < 5; ++rep) {
            const int n = 1 + static_cast<int>(rng.next_below(3));
            const auto psi = random_state(n, rng);
            auto params = random_observable_params(n, rng);
            const auto analytic = expectation_grad_params(psi);
            auto f = [&](const std::vector<double>& values) {
                ObservableParams<double> p{n, values};
                return expectation(psi, hermitian_from_params(p));
            };
            const auto fd = finite_difference(f, params.values, 1e-5);
            for (std::size_t k = 0; k < fd.size(); ++k) {
                if (!close_rel(analytic[k], fd[k], 1e-6, 1e-9)) {
                    return false;
                }
            }
        }
        return true;
    });

    t.check("expectations stay inside the eigenvalue bounds", [] {
        Prng rng(29, kStreamModel);
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 1 + static_cast<int>(rng.next_below(3));
            const auto psi = random_state(n, rng);
            const auto b =
                hermitian_from_params(random_observable_params(n, rng));
            const auto [lo, hi] = eigen_bounds(b);
            const double e = expectation(psi, b);
            if (e < lo - 1e-8 || e > hi + 1e-8) {
                return false;
            }
        }
        return true;
    });

    t.check("optimizer single-step formulas", [] {
        std::vector<double> p{0.0};
        auto rms = OptimizerState<double>::rmsprop(0.01);
        optimizer_step(rms, p, {1.0});
        if (std::abs(p[0] + 0.01 / (std::sqrt(0.1) + 1e-8)) > 1e-12) {
            return false;
        }
        std::vector<double> q{0.0};
        auto adam = OptimizerState<double>::adam(0.01);
        optimizer_step(adam, q, {1.0});
        return std::abs(q[0] + 0.01 / (1.0 + 1e-8)) < 1e-12;
    });

    t.check("bce loss and clamp", [] {
        const auto r = bce_loss(0.5, 1);
        if (std::abs(r.loss - std::log(2.0)) > 1e-12) {
            return false;
        }
        const auto clamped = bce_loss(1.0, 0); // clamp keeps the loss finite
        return std::isfinite(clamped.loss) && clamped.loss > 10;
    });

    t.check("dataset anchors and standardization", [] {
        Prng rng(0, kStreamData);
        const auto moons = make_moons<double>(8, 0.0, rng);
        if (std::abs(moons.features[0][0] - 1.0) > 1e-12 ||
            std::abs(moons.features[0][1]) > 1e-12 ||
            moons.labels[0] != 0) {
            return false;
        }
        const auto circles = make_circles<double>(8, 0.0, 0.5, rng);
        if (std::abs(circles.features[4][0] - 0.5) > 1e-12 ||
            circles.labels[4] != 1) {
            return false;
        }
        Prng rng2(1, kStreamData);
        auto blobs = make_blob_classification<double>(60, 3, 1.0, rng2);
        const auto split = split_and_standardize(blobs, 40, 20, rng2);
        for (std::size_t j = 0; j < 3; ++j) {
            double mean = 0;
            for (const auto& row : split.train.features) {
                mean += row[j];
            }
            mean /= 40.0;
            if (std::abs(mean) > 1e-9) {
                return false;
            }
        }
        return true;
    });

    t.check("every variant's gradient set matches finite differences", [] {
        for (const VariantKind kind : kAllVariants) {
            AnsatzConfig cfg{2, 1};
            Prng init(7, kStreamModel);
            auto model = make_model<double>(kind, cfg, 2, init, 4);
            const std::vector<double> x{0.3, -0.8};
            const int y = 1;
            const auto [p, cache] = model_forward(model, x);
            const auto flat_grad =
                flatten_gradients(model_backward(model, cache, y));
            auto f = [&](const std::vector<double>& flat) {
                auto probe = model;
                assign_trainable(probe, flat);
                return bce_loss(model_forward(probe, x).first, y).loss;
            };
            const auto fd =
                finite_difference(f, flatten_trainable(model), 1e-4);
            if (fd.size() != flat_grad.size()) {
                return false;
            }
            for (std::size_t k = 0; k < fd.size(); ++k) {
                if (!close_rel(flat_grad[k], fd[k], 1e-4, 1e-7)) {
                    return false;
                }
            }
        }
        return true;
    });

    os << (t.failed ? "selftest: FAILED " : "selftest: passed ") << t.passed
       << '/' << (t.passed + t.failed) << " checks\n";
    return t.failed == 0;
}

} // namespace qpm
