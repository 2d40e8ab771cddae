#include "cavnet/network.hpp"

#include <cmath>

namespace cavnet {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const complex kI{0.0, 1.0};

}  // namespace

NetworkTransforms build_transforms(double phi1, double phi2) {
  const complex e1 = std::polar(1.0, phi1);
  const complex e2 = std::polar(1.0, phi2);

  NetworkTransforms t;

  // Feedback lasers pass the first beam splitter and then the phi1 shifter
  // on the lower arm before reaching the cavities.
  t.feedback_to_cavity.from = Basis::Feedback;
  t.feedback_to_cavity.to = Basis::Cavity;
  t.feedback_to_cavity.m = {{{kInvSqrt2, kInvSqrt2 * kI},
                             {kInvSqrt2 * kI * e1, kInvSqrt2 * e1}}};

  // Cavity output passes the phi2 shifter on the upper arm and then the
  // second beam splitter before hitting the detectors.
  t.cavity_to_detector.from = Basis::Cavity;
  t.cavity_to_detector.to = Basis::Detector;
  t.cavity_to_detector.m = {{{kInvSqrt2 * e2, kInvSqrt2 * kI},
                             {kInvSqrt2 * kI * e2, kInvSqrt2}}};

  // Composition in closed form: entries depend on the phases only through
  // e^{i phi1} and e^{i phi2}.
  t.feedback_to_detector.from = Basis::Feedback;
  t.feedback_to_detector.to = Basis::Detector;
  t.feedback_to_detector.m = {{{0.5 * (e2 - e1), 0.5 * kI * (e1 + e2)},
                               {0.5 * kI * (e1 + e2), 0.5 * (e1 - e2)}}};

  t.feedback_to_detector_dphi1.from = Basis::Feedback;
  t.feedback_to_detector_dphi1.to = Basis::Detector;
  t.feedback_to_detector_dphi1.m = {{{-0.5 * kI * e1, -0.5 * e1},
                                     {-0.5 * e1, 0.5 * kI * e1}}};

  return t;
}

BasisTransform transform_derivative(const NetworkParams& p) {
  return build_transforms(p.phi1, p.phi2).feedback_to_detector_dphi1;
}

ModeAmplitudes change_basis(const ModeAmplitudes& x, Basis target,
                            const NetworkTransforms& t) {
  if (x.basis == target) return x;

  if (x.basis == Basis::Feedback && target == Basis::Cavity)
    return t.feedback_to_cavity.apply(x);
  if (x.basis == Basis::Cavity && target == Basis::Feedback)
    return t.feedback_to_cavity.adjoint().apply(x);
  if (x.basis == Basis::Cavity && target == Basis::Detector)
    return t.cavity_to_detector.apply(x);
  if (x.basis == Basis::Detector && target == Basis::Cavity)
    return t.cavity_to_detector.adjoint().apply(x);
  if (x.basis == Basis::Feedback && target == Basis::Detector)
    return t.feedback_to_detector.apply(x);
  // Detector -> Feedback
  return t.feedback_to_detector.adjoint().apply(x);
}

}  // namespace cavnet
