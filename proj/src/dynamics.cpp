#include "cavnet/dynamics.hpp"

#include <cmath>

namespace cavnet {

namespace {

void require_detector_basis(const ModeAmplitudes& alpha) {
  if (alpha.basis != Basis::Detector) {
    throw BasisMismatchError(
        std::string("per-interval dynamics needs detector-basis amplitudes, "
                    "got '") +
        basis_name(alpha.basis) + "'");
  }
}

/// Feedback vector injected for the event: a detector-1 click fires
/// beta^(1), a detector-2 click fires beta^(2), a double click both.
std::array<complex, 2> event_beta(DetectionEvent event,
                                  const FeedbackConfig& fb) {
  std::array<complex, 2> beta{complex{0.0, 0.0}, complex{0.0, 0.0}};
  const int bits = static_cast<int>(event);
  if (bits & 2) {  // detector 1 clicked
    beta[0] += fb.on_d1_b1;
    beta[1] += fb.on_d1_b2;
  }
  if (bits & 1) {  // detector 2 clicked
    beta[0] += fb.on_d2_b1;
    beta[1] += fb.on_d2_b2;
  }
  return beta;
}

std::array<complex, 2> mat_vec(const BasisTransform& t,
                               const std::array<complex, 2>& v) {
  return {t.m[0][0] * v[0] + t.m[0][1] * v[1],
          t.m[1][0] * v[0] + t.m[1][1] * v[1]};
}

EventProbabilities probabilities_from_factors(double q1, double q2,
                                              double eps_jump) {
  EventProbabilities p;
  p.q1 = q1;
  p.q2 = q2;
  p.p00 = q1 * q2;
  p.p01 = q1 * (1.0 - q2);
  p.p10 = (1.0 - q1) * q2;
  p.p11 = (1.0 - q1) * (1.0 - q2);
  p.soundness_warning = (1.0 - p.p00) > eps_jump;
  return p;
}

}  // namespace

ModeAmplitudes no_photon_map(const ModeAmplitudes& alpha,
                             const NetworkParams& params, double t) {
  require_detector_basis(alpha);
  ModeAmplitudes out = alpha;
  out.a1 *= std::exp(-0.5 * params.kappa1 * t);
  out.a2 *= std::exp(-0.5 * params.kappa2 * t);
  return out;
}

double no_detection_probability(const ModeAmplitudes& alpha,
                                const NetworkParams& params, double t) {
  require_detector_basis(alpha);
  const double c1 = -std::expm1(-params.kappa1 * t);
  const double c2 = -std::expm1(-params.kappa2 * t);
  return std::exp(-std::norm(alpha.a1) * c1) *
         std::exp(-std::norm(alpha.a2) * c2);
}

EventProbabilities event_probabilities(const ModeAmplitudes& alpha,
                                       const NetworkParams& params) {
  require_detector_basis(alpha);
  const double c1 = -std::expm1(-params.kappa1 * params.dt);
  const double c2 = -std::expm1(-params.kappa2 * params.dt);
  const double q1 = std::exp(-std::norm(alpha.a1) * c1);
  const double q2 = std::exp(-std::norm(alpha.a2) * c2);
  return probabilities_from_factors(q1, q2, params.eps_jump);
}

ModeAmplitudes apply_event(const ModeAmplitudes& alpha, DetectionEvent event,
                           const FeedbackConfig& feedback,
                           const NetworkTransforms& transforms,
                           const NetworkParams& params) {
  require_detector_basis(alpha);
  ModeAmplitudes kicked = alpha;
  if (event != DetectionEvent::NoClick) {
    const auto kick =
        mat_vec(transforms.feedback_to_detector, event_beta(event, feedback));
    kicked.a1 += kick[0];
    kicked.a2 += kick[1];
  }
  return no_photon_map(kicked, params, params.dt);
}

StateWithDerivative step_with_derivative(const StateWithDerivative& s,
                                         DetectionEvent event,
                                         const FeedbackConfig& feedback,
                                         const NetworkTransforms& transforms,
                                         const NetworkParams& params) {
  require_detector_basis(s.alpha);
  StateWithDerivative out = s;
  if (event != DetectionEvent::NoClick) {
    const auto beta = event_beta(event, feedback);
    const auto kick = mat_vec(transforms.feedback_to_detector, beta);
    const auto dkick = mat_vec(transforms.feedback_to_detector_dphi1, beta);
    out.alpha.a1 += kick[0];
    out.alpha.a2 += kick[1];
    out.dalpha1 += dkick[0];
    out.dalpha2 += dkick[1];
  }
  const double d1 = std::exp(-0.5 * params.kappa1 * params.dt);
  const double d2 = std::exp(-0.5 * params.kappa2 * params.dt);
  out.alpha.a1 *= d1;
  out.alpha.a2 *= d2;
  out.dalpha1 *= d1;
  out.dalpha2 *= d2;
  return out;
}

StepContext make_step_context(const NetworkParams& params,
                              const FeedbackConfig& feedback,
                              const NetworkTransforms& transforms) {
  StepContext ctx;
  ctx.c1 = -std::expm1(-params.kappa1 * params.dt);
  ctx.c2 = -std::expm1(-params.kappa2 * params.dt);
  ctx.decay1 = std::exp(-0.5 * params.kappa1 * params.dt);
  ctx.decay2 = std::exp(-0.5 * params.kappa2 * params.dt);
  ctx.eps_jump = params.eps_jump;
  const std::array<complex, 2> b1{feedback.on_d1_b1, feedback.on_d1_b2};
  const std::array<complex, 2> b2{feedback.on_d2_b1, feedback.on_d2_b2};
  ctx.kick_d1 = mat_vec(transforms.feedback_to_detector, b1);
  ctx.kick_d2 = mat_vec(transforms.feedback_to_detector, b2);
  ctx.dkick_d1 = mat_vec(transforms.feedback_to_detector_dphi1, b1);
  ctx.dkick_d2 = mat_vec(transforms.feedback_to_detector_dphi1, b2);
  return ctx;
}

EventProbabilities step_probabilities(complex a1, complex a2,
                                      const StepContext& ctx) {
  const double q1 = std::exp(-std::norm(a1) * ctx.c1);
  const double q2 = std::exp(-std::norm(a2) * ctx.c2);
  return probabilities_from_factors(q1, q2, ctx.eps_jump);
}

std::array<double, 4> step_probability_derivatives(
    const StateWithDerivative& s, const StepContext& ctx,
    const EventProbabilities& p) {
  // d|a|^2/dphi1 = 2 Re(conj(a) da), and q = exp(-|a|^2 c).
  const double dn1 = 2.0 * (s.alpha.a1.real() * s.dalpha1.real() +
                            s.alpha.a1.imag() * s.dalpha1.imag());
  const double dn2 = 2.0 * (s.alpha.a2.real() * s.dalpha2.real() +
                            s.alpha.a2.imag() * s.dalpha2.imag());
  const double dq1 = -ctx.c1 * p.q1 * dn1;
  const double dq2 = -ctx.c2 * p.q2 * dn2;
  return {dq1 * p.q2 + p.q1 * dq2, dq1 * (1.0 - p.q2) - p.q1 * dq2,
          -dq1 * p.q2 + (1.0 - p.q1) * dq2,
          -dq1 * (1.0 - p.q2) - (1.0 - p.q1) * dq2};
}

void apply_event_fast(complex& a1, complex& a2, DetectionEvent event,
                      const StepContext& ctx) {
  const int bits = static_cast<int>(event);
  if (bits & 2) {
    a1 += ctx.kick_d1[0];
    a2 += ctx.kick_d1[1];
  }
  if (bits & 1) {
    a1 += ctx.kick_d2[0];
    a2 += ctx.kick_d2[1];
  }
  a1 *= ctx.decay1;
  a2 *= ctx.decay2;
}

void apply_event_with_derivative(StateWithDerivative& s, DetectionEvent event,
                                 const StepContext& ctx) {
  const int bits = static_cast<int>(event);
  if (bits & 2) {
    s.alpha.a1 += ctx.kick_d1[0];
    s.alpha.a2 += ctx.kick_d1[1];
    s.dalpha1 += ctx.dkick_d1[0];
    s.dalpha2 += ctx.dkick_d1[1];
  }
  if (bits & 1) {
    s.alpha.a1 += ctx.kick_d2[0];
    s.alpha.a2 += ctx.kick_d2[1];
    s.dalpha1 += ctx.dkick_d2[0];
    s.dalpha2 += ctx.dkick_d2[1];
  }
  s.alpha.a1 *= ctx.decay1;
  s.alpha.a2 *= ctx.decay2;
  s.dalpha1 *= ctx.decay1;
  s.dalpha2 *= ctx.decay2;
}

}  // namespace cavnet
