#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qpm/gradients.hpp"
#include "qpm/observable.hpp"
#include "qpm/prng.hpp"
#include "qpm/state.hpp"

namespace {

using qpm::AnsatzConfig;
using qpm::CircuitParams;
using qpm::GradientRequest;
using qpm::Measurement;
using qpm::ObservableParams;
using qpm::Prng;

constexpr double kPi = std::numbers::pi;

GradientRequest<double> random_request(int n_qubits, int depth, Prng& rng,
                                       bool pauli_z) {
  GradientRequest<double> req;
  req.cfg = AnsatzConfig{n_qubits, depth};
  req.x.resize(2);
  for (auto& v : req.x) v = rng.uniform(-1.5, 1.5);
  req.params.angles.resize(req.cfg.angle_count());
  for (auto& a : req.params.angles) a = rng.uniform(0.0, 2 * kPi);
  if (pauli_z) {
    req.measurement = Measurement<double>::pauli_z(0);
  } else {
    ObservableParams<double> p;
    p.n_qubits = n_qubits;
    p.values.resize(qpm::observable_param_count(n_qubits));
    for (auto& v : p.values) v = rng.uniform(-1.0, 1.0);
    req.measurement =
        Measurement<double>::hermitian(qpm::hermitian_from_params(p));
  }
  return req;
}

double expectation_at(const GradientRequest<double>& req,
                      const std::vector<double>& angles) {
  CircuitParams<double> p{angles};
  return qpm::measure(qpm::forward_state(req.x, p, req.cfg), req.measurement);
}

// Single qubit, single RY(theta), <Z>: E = cos(theta), dE/dtheta = -sin(theta).
TEST(Gradients, ParameterShiftClosedFormRy) {
  GradientRequest<double> req;
  req.cfg = AnsatzConfig{1, 1};
  req.x = {0.0};
  req.measurement = Measurement<double>::pauli_z(0);
  for (double theta : {0.0, 0.3, kPi / 2, 2.0, -1.1}) {
    req.params.angles = {0.0, theta, 0.0};
    auto g = qpm::grad_expectation_wrt_angles(req);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_NEAR(g[0], 0.0, 1e-12);
    EXPECT_NEAR(g[1], -std::sin(theta), 1e-12) << "theta=" << theta;
    EXPECT_NEAR(g[2], 0.0, 1e-12);
  }
  req.params.angles = {0.0, kPi / 2, 0.0};
  EXPECT_NEAR(qpm::grad_expectation_wrt_angles(req)[1], -1.0, 1e-12);
}

TEST(Gradients, ZeroObservableGivesZeroGradient) {
  Prng rng(5, qpm::kStreamModel);
  auto req = random_request(2, 2, rng, false);
  req.measurement.matrix.entries.assign(16, {0, 0});
  for (double g : qpm::grad_expectation_wrt_angles(req)) {
    EXPECT_DOUBLE_EQ(g, 0.0);
  }
  for (double g : qpm::grad_expectation_adjoint(req)) {
    EXPECT_DOUBLE_EQ(g, 0.0);
  }
}

TEST(Gradients, ParameterShiftMatchesFiniteDifference) {
  Prng rng(31, qpm::kStreamModel);
  for (int rep = 0; rep < 6; ++rep) {
    auto req = random_request(1 + rep % 3, 1 + rep % 2, rng, rep % 2 == 0);
    auto ps = qpm::grad_expectation_wrt_angles(req);
    auto fd = qpm::finite_difference<double>(
        [&](const std::vector<double>& a) { return expectation_at(req, a); },
        req.params.angles);
    ASSERT_EQ(ps.size(), fd.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
      EXPECT_NEAR(ps[k], fd[k], 1e-7) << "rep " << rep << " angle " << k;
    }
  }
}

TEST(Gradients, TwoPiPeriodicity) {
  Prng rng(47, qpm::kStreamModel);
  auto req = random_request(2, 2, rng, false);
  auto base = qpm::grad_expectation_wrt_angles(req);
  auto shifted = req;
  for (auto& a : shifted.params.angles) a += 2 * kPi;
  auto wrapped = qpm::grad_expectation_wrt_angles(shifted);
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_NEAR(base[k], wrapped[k], 1e-10);
  }
}

TEST(Gradients, LinearInObservable) {
  // grad of <alpha * B> is alpha * grad of <B>.
  Prng rng(62, qpm::kStreamModel);
  auto req = random_request(2, 1, rng, false);
  auto base = qpm::grad_expectation_wrt_angles(req);
  for (double alpha : {-3.0, -0.5, 0.0, 0.25, 3.0}) {
    auto scaled = req;
    for (auto& e : scaled.measurement.matrix.entries) e *= alpha;
    auto g = qpm::grad_expectation_wrt_angles(scaled);
    for (std::size_t k = 0; k < base.size(); ++k) {
      EXPECT_NEAR(g[k], alpha * base[k], 1e-10);
    }
  }
}

TEST(Gradients, AdjointMatchesParameterShift) {
  Prng rng(73, qpm::kStreamModel);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 1 + rep % 3;
    auto req = random_request(n, 1 + rep % 3, rng, rep % 2 == 1);
    if (req.measurement.kind == Measurement<double>::Kind::PauliZ) {
      req.measurement.qubit = rep % n;
    }
    auto ps = qpm::grad_expectation_wrt_angles(req);
    auto ad = qpm::grad_expectation_adjoint(req);
    ASSERT_EQ(ps.size(), ad.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
      EXPECT_NEAR(ad[k], ps[k], 1e-10) << "rep " << rep << " angle " << k;
    }
  }
}

TEST(Gradients, AdjointLeavesRequestUsable) {
  Prng rng(91, qpm::kStreamModel);
  auto req = random_request(3, 2, rng, false);
  auto first = qpm::grad_expectation_adjoint(req);
  auto second = qpm::grad_expectation_adjoint(req);
  for (std::size_t k = 0; k < first.size(); ++k) {
    EXPECT_DOUBLE_EQ(first[k], second[k]);
  }
}

TEST(Gradients, RequestValidation) {
  GradientRequest<double> req;
  req.cfg = AnsatzConfig{2, 1};
  req.x = {0.1, 0.2};
  req.params.angles.assign(5, 0.0);  // expects 6
  req.measurement = Measurement<double>::pauli_z(0);
  EXPECT_THROW(qpm::grad_expectation_wrt_angles(req), std::invalid_argument);
  EXPECT_THROW(qpm::grad_expectation_adjoint(req), std::invalid_argument);

  req.params.angles.assign(6, 0.0);
  qpm::HermitianMatrix<double> wrong;
  wrong.dim = 2;  // needs 4 for two qubits
  wrong.entries.assign(4, {0, 0});
  req.measurement = Measurement<double>::hermitian(wrong);
  EXPECT_THROW(qpm::grad_expectation_wrt_angles(req), std::invalid_argument);
}

TEST(Gradients, DenseOracleMatchesStrideSimulator) {
  Prng rng(120, qpm::kStreamModel);
  for (int n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      AnsatzConfig cfg{n, 1 + rep % 3};
      std::vector<double> x(2);
      for (auto& v : x) v = rng.uniform(-1.5, 1.5);
      CircuitParams<double> params;
      params.angles.resize(cfg.angle_count());
      for (auto& a : params.angles) a = rng.uniform(0.0, 2 * kPi);
      auto fast = qpm::forward_state(x, params, cfg);
      auto slow = qpm::dense_circuit_oracle(x, params, cfg);
      ASSERT_EQ(fast.dim(), slow.dim());
      for (std::size_t i = 0; i < fast.dim(); ++i) {
        EXPECT_NEAR(std::abs(fast.amplitudes[i] - slow.amplitudes[i]), 0.0,
                    1e-10)
            << "n=" << n << " rep=" << rep << " index=" << i;
      }
    }
  }
}

TEST(Gradients, DenseOracleTrivialCases) {
  // Zero angles, zero features: circuit is the identity on |0...0>.
  AnsatzConfig cfg{2, 1};
  CircuitParams<double> params;
  params.angles.assign(cfg.angle_count(), 0.0);
  auto s = qpm::dense_circuit_oracle<double>({0.0, 0.0}, params, cfg);
  EXPECT_NEAR(std::abs(s.amplitudes[0] - std::complex<double>{1, 0}), 0.0,
              1e-14);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_NEAR(std::abs(s.amplitudes[i]), 0.0, 1e-14);
  }
  EXPECT_THROW(qpm::dense_circuit_oracle<double>({0.0}, params,
                                                 AnsatzConfig{5, 1}),
               std::invalid_argument);
}

TEST(Gradients, FiniteDifferenceQuadratic) {
  // f(p) = p0^2 + 2 p1^2 at (1, 1): grad = (2, 4).
  auto f = [](const std::vector<double>& p) {
    return p[0] * p[0] + 2 * p[1] * p[1];
  };
  auto g = qpm::finite_difference<double>(f, {1.0, 1.0});
  EXPECT_NEAR(g[0], 2.0, 1e-8);
  EXPECT_NEAR(g[1], 4.0, 1e-8);
}

TEST(Gradients, FiniteDifferenceConstantAndSine) {
  auto zero = qpm::finite_difference<double>(
      [](const std::vector<double>&) { return 3.5; }, {0.2, -0.7, 1.1});
  for (double g : zero) EXPECT_DOUBLE_EQ(g, 0.0);

  auto g = qpm::finite_difference<double>(
      [](const std::vector<double>& p) { return std::sin(p[0]); }, {0.0});
  EXPECT_NEAR(g[0], 1.0, 1e-10);
}

TEST(Gradients, FiniteDifferenceValidation) {
  auto f = [](const std::vector<double>& p) { return p[0]; };
  EXPECT_THROW(qpm::finite_difference<double>(f, {1.0}, 0.0),
               std::invalid_argument);
  EXPECT_THROW(qpm::finite_difference<double>(f, {1.0}, -1e-5),
               std::invalid_argument);
  auto bad = [](const std::vector<double>& p) {
    return p[0] > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  EXPECT_THROW(qpm::finite_difference<double>(bad, {0.0}),
               std::runtime_error);
}

TEST(Gradients, MeasureDispatch) {
  auto s = qpm::zero_state(1);
  EXPECT_DOUBLE_EQ(qpm::measure(s, Measurement<double>::pauli_z(0)), 1.0);
  ObservableParams<double> p{1, {2.5, -0.5, 0.0, 0.0}};
  auto m = Measurement<double>::hermitian(qpm::hermitian_from_params(p));
  EXPECT_DOUBLE_EQ(qpm::measure(s, m), 2.5);
}

}  // namespace
