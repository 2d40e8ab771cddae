#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cavnet/errors.hpp"
#include "cavnet/fisher.hpp"

using namespace cavnet;

namespace {

NetworkParams reference_params() {
  NetworkParams p;
  p.phi1 = 0.3141592653589793;  // pi/10
  p.phi2 = 0.0;
  p.kappa1 = 1.0;
  p.kappa2 = 1.0;
  p.dt = 0.5;
  return p;
}

FeedbackConfig reference_feedback() {
  FeedbackConfig f;
  f.on_d1_b2 = complex{1.0, 0.0};
  f.on_d2_b1 = complex{2.0, 0.0};
  return f;
}

ModeAmplitudes cavity_ones() {
  return ModeAmplitudes{complex{1.0, 0.0}, complex{1.0, 0.0}, Basis::Cavity};
}

std::vector<DetectionEvent> decode_record(std::size_t index, int n) {
  // Base-4 digits, first step most significant.
  std::vector<DetectionEvent> ev(n);
  for (int k = n - 1; k >= 0; --k) {
    ev[k] = static_cast<DetectionEvent>(index & 3);
    index >>= 2;
  }
  return ev;
}

}  // namespace

TEST_CASE("enumerated record probabilities are complete at every depth") {
  const EnumerationResult r = enumerate_records(
      cavity_ones(), reference_params(), reference_feedback(), 5, EnumerationOptions{});
  REQUIRE(r.fisher.size() == 5);
  REQUIRE(r.total_probability.size() == 5);
  for (double tp : r.total_probability)
    CHECK(tp == doctest::Approx(1.0).epsilon(1e-12));
  for (double f : r.fisher) CHECK(f >= 0.0);
  // Information accumulates with record length.
  for (std::size_t d = 1; d < r.fisher.size(); ++d)
    CHECK(r.fisher[d] >= r.fisher[d - 1] - 1e-15);
}

TEST_CASE("leaves agree with per-string probabilities and sum correctly") {
  const int n = 3;
  EnumerationOptions opt;
  opt.collect_leaves = true;
  const NetworkParams p = reference_params();
  const FeedbackConfig f = reference_feedback();
  const EnumerationResult r =
      enumerate_records(cavity_ones(), p, f, n, opt);
  REQUIRE(r.leaf_probability.size() == 64);
  REQUIRE(r.leaf_derivative.size() == 64);

  double psum = 0.0;
  double dsum = 0.0;
  double fisher = 0.0;
  for (std::size_t idx = 0; idx < 64; ++idx) {
    const auto [ps, dps] = string_probability_with_derivative(
        decode_record(idx, n), cavity_ones(), p, f);
    CHECK(r.leaf_probability[idx] == doctest::Approx(ps).epsilon(1e-13));
    CHECK(r.leaf_derivative[idx] == doctest::Approx(dps).epsilon(1e-10));
    psum += ps;
    dsum += dps;
    if (ps > 1e-30) fisher += dps * dps / ps;
  }
  CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dsum) <= 1e-12);  // derivative of a normalization
  CHECK(r.fisher[n - 1] == doctest::Approx(fisher).epsilon(1e-12));
}

TEST_CASE("string derivative matches a finite difference of the probability") {
  const FeedbackConfig f = reference_feedback();
  const std::vector<DetectionEvent> record = decode_record(0b100111, 3);
  const double h = 1e-5;
  NetworkParams p = reference_params();
  const auto [ps, dps] =
      string_probability_with_derivative(record, cavity_ones(), p, f);
  NetworkParams pp = p;
  pp.phi1 += h;
  NetworkParams pm = p;
  pm.phi1 -= h;
  const double fp =
      string_probability_with_derivative(record, cavity_ones(), pp, f).first;
  const double fm =
      string_probability_with_derivative(record, cavity_ones(), pm, f).first;
  const double fd = (fp - fm) / (2.0 * h);
  CHECK(ps > 0.0);
  CHECK(dps == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("a single interval carries no phase information") {
  // The first step sees only the cavity-basis initial state, which reaches
  // the detectors independently of the estimated phase; the first kick has
  // not happened yet.
  const double f1 = fisher_information(cavity_ones(), reference_params(),
                                       reference_feedback(), 1);
  CHECK(std::abs(f1) <= 1e-12);
}

TEST_CASE("no feedback means no information at any depth") {
  const FeedbackConfig none{};
  const EnumerationResult r = enumerate_records(
      cavity_ones(), reference_params(), none, 4, EnumerationOptions{});
  for (double f : r.fisher) CHECK(std::abs(f) <= 1e-12);
  CHECK(markov_gap(cavity_ones(), reference_params(), none, 3) <= 1e-12);
}

TEST_CASE("feedback makes the record non-Markovian") {
  const double gap =
      markov_gap(cavity_ones(), reference_params(), reference_feedback(), 3);
  CHECK(gap > 1e-12);
  CHECK(gap <= 1.0);
}

TEST_CASE("enumeration depth limits are enforced") {
  EnumerationOptions opt;
  opt.n_cap = 14;
  CHECK_THROWS_AS(enumerate_records(cavity_ones(), reference_params(),
                                    reference_feedback(), 15, opt),
                  BudgetError);
  opt.collect_leaves = true;
  CHECK_THROWS_AS(enumerate_records(cavity_ones(), reference_params(),
                                    reference_feedback(), 11, opt),
                  BudgetError);
  CHECK_THROWS_AS(enumerate_records(cavity_ones(), reference_params(),
                                    reference_feedback(), 0, opt),
                  ConfigError);
  EnumerationOptions m3;
  m3.collect_m3 = true;
  CHECK_THROWS_AS(
      enumerate_records(cavity_ones(), reference_params(), reference_feedback(), 2, m3),
      ConfigError);
}

TEST_CASE("quadratic scaling fit recovers exact synthetic coefficients") {
  const std::vector<int> n{2, 3, 4, 5, 6, 7, 8};
  std::vector<double> f;
  const double a = 3.5e-4;
  const double b = -2.0e-5;
  for (int k : n) f.push_back(a * k * k + b * k);
  const ScalingFit fit = fit_quadratic_scaling(n, f);
  CHECK(fit.has_information);
  CHECK(fit.a == doctest::Approx(a).epsilon(1e-12));
  CHECK(fit.b == doctest::Approx(b).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-zero information yields no fit") {
  const std::vector<int> n{1, 2, 3, 4};
  const std::vector<double> f{0.0, 0.0, 0.0, 0.0};
  const ScalingFit fit = fit_quadratic_scaling(n, f);
  CHECK_FALSE(fit.has_information);
}

TEST_CASE("fit rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_quadratic_scaling({1, 2}, {1.0}),
                  std::invalid_argument);  // mismatched lengths
  CHECK_THROWS_AS(fit_quadratic_scaling({2, 3}, {1.0, 2.0}),
                  std::invalid_argument);  // needs 3 distinct lengths
  CHECK_THROWS_AS(fit_quadratic_scaling({2, 2, 2}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("extrapolated information converts time to steps through dt") {
  ScalingFit fit;
  fit.a = 2.0;
  fit.b = -1.0;
  fit.has_information = true;
  // t = 3, dt = 0.5 -> N = 6 -> F = 2*36 - 6 = 66.
  CHECK(extrapolated_fisher(fit, 3.0, 0.5) == doctest::Approx(66.0));
}

TEST_CASE("fisher_scaling reports every depth and fits without the first") {
  NetworkParams p = reference_params();
  p.dt = 0.5;
  const FisherResult r =
      fisher_scaling(cavity_ones(), p, reference_feedback(), 6);
  REQUIRE(r.n_values.size() == 6);
  REQUIRE(r.fisher.size() == 6);
  CHECK(r.n_values.front() == 1);
  CHECK(r.n_values.back() == 6);
  CHECK(std::abs(r.fisher.front()) <= 1e-12);
  CHECK(r.fisher.back() > 0.0);
  CHECK(r.fit.has_information);
  CHECK(r.fit.a > 0.0);
  CHECK(r.dt == p.dt);
  CHECK(r.phi1 == p.phi1);
  CHECK(r.phi2 == p.phi2);
}

TEST_CASE("enumeration is identical for any worker count") {
  EnumerationOptions w1;
  w1.workers = 1;
  EnumerationOptions w4;
  w4.workers = 4;
  const EnumerationResult a = enumerate_records(
      cavity_ones(), reference_params(), reference_feedback(), 6, w1);
  const EnumerationResult b = enumerate_records(
      cavity_ones(), reference_params(), reference_feedback(), 6, w4);
  REQUIRE(a.fisher.size() == b.fisher.size());
  for (std::size_t d = 0; d < a.fisher.size(); ++d) {
    CHECK(a.fisher[d] == b.fisher[d]);
    CHECK(a.total_probability[d] == b.total_probability[d]);
  }
}
