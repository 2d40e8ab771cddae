#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "cavnet/network.hpp"

using cavnet::Basis;
using cavnet::BasisTransform;
using cavnet::build_transforms;
using cavnet::change_basis;
using cavnet::complex;
using cavnet::ModeAmplitudes;
using cavnet::NetworkParams;
using cavnet::NetworkTransforms;
using cavnet::transform_derivative;

namespace {

constexpr double kPi = 3.14159265358979323846;
const complex kI{0.0, 1.0};

double matrix_distance(const BasisTransform& a, const BasisTransform& b) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      worst = std::max(worst, std::abs(a.m[i][j] - b.m[i][j]));
  return worst;
}

}  // namespace

TEST_CASE("all network transforms are unitary for random phases") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> phase(-2.0 * kPi, 2.0 * kPi);
  for (int trial = 0; trial < 1000; ++trial) {
    const double phi1 = phase(gen);
    const double phi2 = phase(gen);
    const NetworkTransforms t = build_transforms(phi1, phi2);
    CHECK(t.feedback_to_cavity.unitarity_defect() <= 1e-12);
    CHECK(t.cavity_to_detector.unitarity_defect() <= 1e-12);
    CHECK(t.feedback_to_detector.unitarity_defect() <= 1e-12);
    CHECK(std::abs(std::abs(t.feedback_to_cavity.det()) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(t.feedback_to_detector.det()) - 1.0) <= 1e-12);
  }
}

TEST_CASE("feedback-to-detector map matches its closed form") {
  // M_ab = (1/2) [[e2 - e1, i(e1 + e2)], [i(e1 + e2), e1 - e2]]
  // with ek = exp(i phik).
  std::mt19937_64 gen(777);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const double phi1 = phase(gen);
    const double phi2 = phase(gen);
    const complex e1 = std::exp(kI * phi1);
    const complex e2 = std::exp(kI * phi2);
    BasisTransform expected;
    expected.m[0][0] = 0.5 * (e2 - e1);
    expected.m[0][1] = 0.5 * kI * (e1 + e2);
    expected.m[1][0] = 0.5 * kI * (e1 + e2);
    expected.m[1][1] = 0.5 * (e1 - e2);
    const NetworkTransforms t = build_transforms(phi1, phi2);
    CHECK(matrix_distance(t.feedback_to_detector, expected) <= 1e-14);
  }
}

TEST_CASE("feedback-to-detector map is the composition of the two stages") {
  const NetworkTransforms t = build_transforms(0.7, -1.3);
  BasisTransform prod;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      complex s{0.0, 0.0};
      for (int k = 0; k < 2; ++k)
        s += t.cavity_to_detector.m[i][k] * t.feedback_to_cavity.m[k][j];
      prod.m[i][j] = s;
    }
  }
  CHECK(matrix_distance(t.feedback_to_detector, prod) <= 1e-14);
}

TEST_CASE("diagonal of the feedback-to-detector map vanishes at equal phases") {
  for (double phi : {0.0, 0.4, -2.1, kPi / 2.0}) {
    const NetworkTransforms t = build_transforms(phi, phi);
    CHECK(std::abs(t.feedback_to_detector.m[0][0]) <= 1e-15);
    CHECK(std::abs(t.feedback_to_detector.m[1][1]) <= 1e-15);
  }
}

TEST_CASE("cavity-to-detector map at phi2 = pi/2") {
  const NetworkTransforms t = build_transforms(0.0, kPi / 2.0);
  const double r = 1.0 / std::sqrt(2.0);
  BasisTransform expected;
  expected.m[0][0] = r * kI;
  expected.m[0][1] = r * kI;
  expected.m[1][0] = complex{-r, 0.0};
  expected.m[1][1] = complex{r, 0.0};
  CHECK(matrix_distance(t.cavity_to_detector, expected) <= 1e-14);
}

TEST_CASE("adjoint inverts the transform") {
  const NetworkTransforms t = build_transforms(1.1, 0.3);
  const ModeAmplitudes x{complex{0.8, -0.2}, complex{-1.5, 0.4},
                         Basis::Feedback};
  const ModeAmplitudes y = t.feedback_to_detector.apply(x);
  CHECK(y.basis == Basis::Detector);
  const ModeAmplitudes back = t.feedback_to_detector.adjoint().apply(y);
  CHECK(back.basis == Basis::Feedback);
  CHECK(std::abs(back.a1 - x.a1) <= 1e-14);
  CHECK(std::abs(back.a2 - x.a2) <= 1e-14);
}

TEST_CASE("applying a transform in the wrong basis throws") {
  const NetworkTransforms t = build_transforms(0.0, 0.0);
  const ModeAmplitudes x{complex{1.0, 0.0}, complex{0.0, 0.0}, Basis::Cavity};
  CHECK_THROWS_AS(t.feedback_to_detector.apply(x),
                  cavnet::BasisMismatchError);
}

TEST_CASE("phase derivative of the feedback-to-detector map matches finite differences") {
  const double h = 1e-6;
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkParams p;
    p.phi1 = phase(gen);
    p.phi2 = phase(gen);
    const BasisTransform d = transform_derivative(p);
    CHECK(d.from == Basis::Feedback);
    CHECK(d.to == Basis::Detector);
    const NetworkTransforms plus = build_transforms(p.phi1 + h, p.phi2);
    const NetworkTransforms minus = build_transforms(p.phi1 - h, p.phi2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const complex fd = (plus.feedback_to_detector.m[i][j] -
                            minus.feedback_to_detector.m[i][j]) /
                           (2.0 * h);
        CHECK(std::abs(d.m[i][j] - fd) <= 1e-9);
      }
    }
  }
}

TEST_CASE("change_basis reaches every basis and round-trips") {
  const NetworkTransforms t = build_transforms(0.9, -0.4);
  const ModeAmplitudes b{complex{1.0, 0.5}, complex{-0.3, 0.2},
                         Basis::Feedback};
  const ModeAmplitudes same = change_basis(b, Basis::Feedback, t);
  CHECK(same.a1 == b.a1);
  CHECK(same.a2 == b.a2);

  const ModeAmplitudes det = change_basis(b, Basis::Detector, t);
  CHECK(det.basis == Basis::Detector);
  const ModeAmplitudes back = change_basis(det, Basis::Feedback, t);
  CHECK(std::abs(back.a1 - b.a1) <= 1e-14);
  CHECK(std::abs(back.a2 - b.a2) <= 1e-14);

  // Norm is preserved along the chain.
  const ModeAmplitudes cav = change_basis(b, Basis::Cavity, t);
  const double n0 = std::norm(b.a1) + std::norm(b.a2);
  const double n1 = std::norm(cav.a1) + std::norm(cav.a2);
  CHECK(std::abs(n0 - n1) <= 1e-12);
}
