#pragma once

#include <array>

#include "cavnet/network.hpp"

namespace cavnet {

/// Outcome of one detection interval. The two bits are (detector 1,
/// detector 2), so the integer value doubles as an index into probability
/// tables ordered (00, 01, 10, 11) and the per-detector count increments
/// are (0,0), (0,1), (1,0), (1,1).
enum class DetectionEvent : int {
  NoClick = 0,
  ClickD2 = 1,
  ClickD1 = 2,
  ClickBoth = 3,
};

/// Probabilities of the four detection outcomes over one interval.
struct EventProbabilities {
  double p00 = 1.0;
  double p01 = 0.0;
  double p10 = 0.0;
  double p11 = 0.0;
  /// Per-mode no-click factors the four entries factorize through:
  /// p00 = q1 q2, p01 = q1 (1-q2), p10 = (1-q1) q2, p11 = (1-q1)(1-q2).
  double q1 = 1.0;
  double q2 = 1.0;
  /// Set when 1 - p00 exceeds the configured eps_jump, i.e. the interval is
  /// long enough that multi-photon emissions stop being negligible.
  bool soundness_warning = false;

  double operator[](int i) const {
    switch (i) {
      case 0: return p00;
      case 1: return p01;
      case 2: return p10;
      default: return p11;
    }
  }
};

/// Detector-basis amplitudes paired with their derivative with respect to
/// phi1. The derivative rides along through decay and feedback kicks so
/// detection-record probabilities can be differentiated analytically.
struct StateWithDerivative {
  ModeAmplitudes alpha;           ///< detector basis
  complex dalpha1{0.0, 0.0};      ///< d alpha.a1 / d phi1
  complex dalpha2{0.0, 0.0};      ///< d alpha.a2 / d phi1
};

/// No-photon conditional evolution over duration t: each mode decays as
/// alpha_i -> alpha_i exp(-kappa_i t / 2). Requires detector basis.
ModeAmplitudes no_photon_map(const ModeAmplitudes& alpha,
                             const NetworkParams& params, double t);

/// Probability that neither detector fires within duration t given the
/// current detector-basis amplitudes.
double no_detection_probability(const ModeAmplitudes& alpha,
                                const NetworkParams& params, double t);

/// Four-outcome probabilities for one interval of length params.dt.
/// The sum is exactly 1 by construction.
EventProbabilities event_probabilities(const ModeAmplitudes& alpha,
                                       const NetworkParams& params);

/// Advance detector-basis amplitudes through one interval with known
/// outcome: clicks kick first (the triggered feedback re-expressed at the
/// detectors; both clicks inject both pulses), then both modes decay.
ModeAmplitudes apply_event(const ModeAmplitudes& alpha, DetectionEvent event,
                           const FeedbackConfig& feedback,
                           const NetworkTransforms& transforms,
                           const NetworkParams& params);

/// apply_event plus forward-mode propagation of the phi1 derivative: decay
/// scales the derivative by the same factors, a click adds the derivative
/// of the kick, (dM_ab/dphi1) beta.
StateWithDerivative step_with_derivative(const StateWithDerivative& s,
                                         DetectionEvent event,
                                         const FeedbackConfig& feedback,
                                         const NetworkTransforms& transforms,
                                         const NetworkParams& params);

/// Everything a per-interval update needs that is constant along a run:
/// decay factors, emission coefficients, and the detector-basis kick
/// columns with their phi1 derivatives. Lets the sampling and enumeration
/// loops avoid rebuilding transforms at every step.
struct StepContext {
  double c1 = 0.0;      ///< 1 - exp(-kappa1 dt)
  double c2 = 0.0;      ///< 1 - exp(-kappa2 dt)
  double decay1 = 1.0;  ///< exp(-kappa1 dt / 2)
  double decay2 = 1.0;  ///< exp(-kappa2 dt / 2)
  double eps_jump = 0.05;
  std::array<complex, 2> kick_d1{};   ///< M_ab beta^(1)
  std::array<complex, 2> kick_d2{};   ///< M_ab beta^(2)
  std::array<complex, 2> dkick_d1{};  ///< (dM_ab/dphi1) beta^(1)
  std::array<complex, 2> dkick_d2{};  ///< (dM_ab/dphi1) beta^(2)
};

StepContext make_step_context(const NetworkParams& params,
                              const FeedbackConfig& feedback,
                              const NetworkTransforms& transforms);

/// event_probabilities against a prebuilt context.
EventProbabilities step_probabilities(complex a1, complex a2,
                                      const StepContext& ctx);

/// Derivatives of the four outcome probabilities with respect to phi1 at
/// the given state, ordered like EventProbabilities. Chain rule through
/// q_i = exp(-|a_i|^2 c_i): dq_i = -c_i q_i 2 Re(conj(a_i) da_i).
std::array<double, 4> step_probability_derivatives(
    const StateWithDerivative& s, const StepContext& ctx,
    const EventProbabilities& p);

/// In-place apply_event against a prebuilt context (no derivative slot).
void apply_event_fast(complex& a1, complex& a2, DetectionEvent event,
                      const StepContext& ctx);

/// In-place step_with_derivative against a prebuilt context.
void apply_event_with_derivative(StateWithDerivative& s, DetectionEvent event,
                                 const StepContext& ctx);

}  // namespace cavnet
