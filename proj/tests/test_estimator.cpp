#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cavnet/estimator.hpp"
#include "cavnet/trajectory.hpp"

using namespace cavnet;

namespace {

NetworkParams reference_params() {
  NetworkParams p;
  p.kappa1 = 1.0;
  p.kappa2 = 1.0;
  p.dt = 1e-3;
  return p;
}

FeedbackConfig reference_feedback() {
  FeedbackConfig f;
  f.on_d1_b2 = complex{1.0, 0.0};
  f.on_d2_b1 = complex{2.0, 0.0};
  return f;
}

ModeAmplitudes feedback_ones() {
  return ModeAmplitudes{complex{1.0, 0.0}, complex{1.0, 0.0}, Basis::Feedback};
}

/// Hand-built tally: grid {0, 1}, counts at t=1 chosen so the exceedance
/// marginals and joint are known exactly.
EnsembleStats synthetic_stats() {
  EnsembleStats s;
  s.grid = {0.0, 1.0};
  s.joint.resize(2);
  auto put = [&](std::int64_t c1, std::int64_t c2, std::int64_t n) {
    s.joint[1][EnsembleStats::pack(c1, c2)] += n;
    s.joint[0][EnsembleStats::pack(0, 0)] += n;
    s.n_traj += n;
  };
  put(10, 0, 30);  // d1 above a threshold of 5, d2 below
  put(0, 10, 20);  // d2 above, d1 below
  put(10, 10, 10); // both above
  put(1, 1, 40);   // neither above
  return s;
}

}  // namespace

TEST_CASE("observable names are stable CLI identifiers") {
  CHECK(std::string(observable_name(Observable::P_d1)) == "P_d1");
  CHECK(std::string(observable_name(Observable::P_d2)) == "P_d2");
  CHECK(std::string(observable_name(Observable::P_d1_minus_P_d2)) ==
        "P_d1_minus_P_d2");
}

TEST_CASE("threshold signal reproduces hand-counted exceedance fractions") {
  const EnsembleStats s = synthetic_stats();
  const SignalPoint p1 = threshold_signal(s, CountSelector::D1, 5, 1.0);
  CHECK(p1.value == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(p1.stderr_ ==
        doctest::Approx(std::sqrt(0.4 * 0.6 / 100.0)).epsilon(1e-12));
  const SignalPoint p2 = threshold_signal(s, CountSelector::D2, 5, 1.0);
  CHECK(p2.value == doctest::Approx(0.3).epsilon(1e-15));
  const SignalPoint tot = threshold_signal(s, CountSelector::Total, 5, 1.0);
  // Totals: 10, 10, 20, 2 -> all but the last group exceed 5.
  CHECK(tot.value == doctest::Approx(0.6).epsilon(1e-15));
  // At t=0 nothing exceeds a positive threshold.
  CHECK(threshold_signal(s, CountSelector::D1, 5, 0.0).value == 0.0);
}

TEST_CASE("difference observable has the exact indicator variance") {
  // X = 1{c1 > thr} - 1{c2 > thr} over the synthetic tally:
  // P(X=1) = 0.3, P(X=-1) = 0.2, P(X=0) = 0.5.
  const EnsembleStats s = synthetic_stats();
  const SignalPoint d = observable_signal(s, Observable::P_d1_minus_P_d2, 5, 1.0);
  CHECK(d.value == doctest::Approx(0.1).epsilon(1e-15));
  const double ex2 = 0.3 + 0.2;
  const double var = ex2 - 0.1 * 0.1;
  CHECK(d.stderr_ == doctest::Approx(std::sqrt(var / 100.0)).epsilon(1e-12));
  // Marginal observables route through the same tally.
  CHECK(observable_signal(s, Observable::P_d1, 5, 1.0).value ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK(observable_signal(s, Observable::P_d2, 5, 1.0).value ==
        doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("signal scan output is a full grid x time x observable table") {
  const std::vector<double> grid{-0.4, 0.0, 0.4};
  const std::vector<double> times{0.5, 1.0};
  const std::vector<Observable> obs{Observable::P_d1, Observable::P_d2,
                                    Observable::P_d1_minus_P_d2};
  const SignalCurve curve =
      signal_scan(feedback_ones(), reference_params(), reference_feedback(), grid,
                  times, obs, 5, 200, 11, 0, RunOptions{});
  REQUIRE(curve.points.size() == grid.size() * times.size() * obs.size());
  CHECK(curve.n_traj == 200);
  CHECK(curve.master_seed == 11);
  std::size_t idx = 0;
  for (double phi : grid) {
    for (double t : times) {
      for (Observable o : obs) {
        const SignalSample& p = curve.points[idx++];
        CHECK(p.phi_tilde == phi);
        CHECK(p.time == t);
        CHECK(p.observable == o);
        if (o == Observable::P_d1_minus_P_d2) {
          CHECK(p.value >= -1.0);
          CHECK(p.value <= 1.0);
        } else {
          CHECK(p.value >= 0.0);
          CHECK(p.value <= 1.0);
        }
        CHECK(p.stderr_ >= 0.0);
      }
    }
  }
}

TEST_CASE("the difference curve equals the marginal difference pointwise") {
  // All three observables are read off one ensemble per grid point, so the
  // identity holds exactly, not just statistically.
  const std::vector<double> grid{-1.0, 0.3};
  const std::vector<double> times{1.0};
  const std::vector<Observable> obs{Observable::P_d1, Observable::P_d2,
                                    Observable::P_d1_minus_P_d2};
  const SignalCurve curve =
      signal_scan(feedback_ones(), reference_params(), reference_feedback(), grid,
                  times, obs, 5, 300, 90, 0, RunOptions{});
  for (std::size_t k = 0; k + 2 < curve.points.size(); k += 3) {
    const double lhs = curve.points[k + 2].value;
    const double rhs = curve.points[k].value - curve.points[k + 1].value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("scan results do not depend on the worker count") {
  const std::vector<double> grid{0.1, 0.8};
  const std::vector<double> times{0.5};
  const std::vector<Observable> obs{Observable::P_d1};
  const SignalCurve w1 =
      signal_scan(feedback_ones(), reference_params(), reference_feedback(), grid,
                  times, obs, 5, 150, 5150, 1, RunOptions{});
  const SignalCurve w4 =
      signal_scan(feedback_ones(), reference_params(), reference_feedback(), grid,
                  times, obs, 5, 150, 5150, 4, RunOptions{});
  REQUIRE(w1.points.size() == w4.points.size());
  for (std::size_t k = 0; k < w1.points.size(); ++k) {
    CHECK(w1.points[k].value == w4.points[k].value);
    CHECK(w1.points[k].stderr_ == w4.points[k].stderr_);
  }
  CHECK(w1.aborted == w4.aborted);
  CHECK(w1.jump_warnings == w4.jump_warnings);
}

TEST_CASE("shared seeds make the scan exactly 2pi periodic") {
  const std::vector<double> grid{-3.14159265358979323846,
                                 3.14159265358979323846};
  const std::vector<double> times{1.0};
  const std::vector<Observable> obs{Observable::P_d1, Observable::P_d2};
  const SignalCurve curve =
      signal_scan(feedback_ones(), reference_params(), reference_feedback(), grid,
                  times, obs, 5, 250, 606, 0, RunOptions{});
  REQUIRE(curve.points.size() == 4);
  // Same child seeds and physically identical phases: bitwise equal values
  // would need cos(phi) == cos(phi + 2pi) in floating point, which does not
  // hold, but the sampled click records coincide for almost every seed.
  CHECK(curve.points[0].value ==
        doctest::Approx(curve.points[2].value).epsilon(1e-12));
  CHECK(curve.points[1].value ==
        doctest::Approx(curve.points[3].value).epsilon(1e-12));
}

TEST_CASE("phase uncertainty reports the layout it was asked for") {
  const std::vector<double> times{0.5, 1.0};
  const UncertaintyResult u = phase_uncertainty(
      feedback_ones(), reference_params(), reference_feedback(), 0.314159, 0.05,
      times, 4, 100, 5, 909, 0, RunOptions{});
  CHECK(u.phi_star == doctest::Approx(0.314159));
  CHECK(u.n_subensembles == 4);
  CHECK(u.n_traj_per_sub == 100);
  REQUIRE(u.points.size() == times.size() * 3);
  std::size_t idx = 0;
  for (double t : times) {
    for (int o = 0; o < 3; ++o) {
      const UncertaintyPoint& p = u.points[idx++];
      CHECK(p.time == t);
      CHECK(static_cast<int>(p.observable) == o);
      CHECK(p.variance >= 0.0);
      CHECK(p.gradient_stderr >= 0.0);
      if (!p.zero_gradient) {
        CHECK(p.delta_phi_sq ==
              doctest::Approx(p.variance / (p.gradient * p.gradient))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("zero feedback estimates a flat curve and flags zero gradients") {
  // A cavity-basis start reaches the detectors through a map that depends
  // only on the fixed second phase, and without feedback no click ever
  // couples the estimated phase in. Under common random numbers the records
  // at phi +- delta coincide, so the gradient is identically zero.
  const ModeAmplitudes cavity_ones{complex{1.0, 0.0}, complex{1.0, 0.0},
                                   Basis::Cavity};
  const std::vector<double> times{1.0};
  const UncertaintyResult u = phase_uncertainty(
      cavity_ones, reference_params(), FeedbackConfig{}, 0.314159, 0.05,
      times, 4, 150, 0, 1717, 0, RunOptions{});
  for (const UncertaintyPoint& p : u.points) {
    CHECK(p.gradient == 0.0);
    CHECK(p.zero_gradient);
  }
}

TEST_CASE("uncertainty is reproducible and worker-independent") {
  const std::vector<double> times{0.5};
  const UncertaintyResult a = phase_uncertainty(
      feedback_ones(), reference_params(), reference_feedback(), 0.3, 0.05, times, 3,
      80, 5, 404, 1, RunOptions{});
  const UncertaintyResult b = phase_uncertainty(
      feedback_ones(), reference_params(), reference_feedback(), 0.3, 0.05, times, 3,
      80, 5, 404, 4, RunOptions{});
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    CHECK(a.points[k].mean == b.points[k].mean);
    CHECK(a.points[k].variance == b.points[k].variance);
    CHECK(a.points[k].gradient == b.points[k].gradient);
    CHECK(a.points[k].gradient_stderr == b.points[k].gradient_stderr);
    CHECK(a.points[k].zero_gradient == b.points[k].zero_gradient);
  }
}
