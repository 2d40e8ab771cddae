#pragma once

#include <array>
#include <complex>
#include <string>

#include "cavnet/errors.hpp"

namespace cavnet {

using complex = std::complex<double>;

/// Reference frame a two-mode amplitude pair is expressed in.
///
/// The network couples two cavities through beam splitters and phase
/// shifters. Any pure coherent state of the pair can be written in one of
/// three bases: the cavity modes themselves, the detector modes (what the
/// photon counters see), or the feedback modes (what the injection ports
/// address).
enum class Basis { Cavity, Detector, Feedback };

inline const char* basis_name(Basis b) {
  switch (b) {
    case Basis::Cavity: return "cavity";
    case Basis::Detector: return "detector";
    case Basis::Feedback: return "feedback";
  }
  return "?";
}

/// Two coherent-state amplitudes tagged with the basis they live in.
struct ModeAmplitudes {
  complex a1{0.0, 0.0};
  complex a2{0.0, 0.0};
  Basis basis = Basis::Cavity;
};

/// 2x2 complex transform between mode bases.
struct BasisTransform {
  Basis from = Basis::Cavity;
  Basis to = Basis::Cavity;
  std::array<std::array<complex, 2>, 2> m{};

  /// Apply to an amplitude pair. Throws BasisMismatchError if `x` is not
  /// expressed in the `from` basis.
  ModeAmplitudes apply(const ModeAmplitudes& x) const {
    if (x.basis != from) {
      throw BasisMismatchError(std::string("transform expects basis '") +
                               basis_name(from) + "', got '" +
                               basis_name(x.basis) + "'");
    }
    ModeAmplitudes y;
    y.a1 = m[0][0] * x.a1 + m[0][1] * x.a2;
    y.a2 = m[1][0] * x.a1 + m[1][1] * x.a2;
    y.basis = to;
    return y;
  }

  /// Conjugate transpose; maps `to` back to `from`.
  BasisTransform adjoint() const {
    BasisTransform r;
    r.from = to;
    r.to = from;
    r.m[0][0] = std::conj(m[0][0]);
    r.m[0][1] = std::conj(m[1][0]);
    r.m[1][0] = std::conj(m[0][1]);
    r.m[1][1] = std::conj(m[1][1]);
    return r;
  }

  complex det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

  /// Max absolute deviation of M M^dagger from the identity.
  double unitarity_defect() const {
    const BasisTransform adj = adjoint();
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        complex s{0.0, 0.0};
        for (int k = 0; k < 2; ++k) s += m[i][k] * adj.m[k][j];
        const complex target = (i == j) ? complex{1.0, 0.0} : complex{0.0, 0.0};
        worst = std::max(worst, std::abs(s - target));
      }
    }
    return worst;
  }

  bool is_unitary(double tol = 1e-12) const { return unitarity_defect() <= tol; }
};

/// Static parameters of the two-cavity network.
struct NetworkParams {
  double phi1 = 0.0;    ///< phase after the first beam splitter
  double phi2 = 0.0;    ///< phase before the second beam splitter
  double kappa1 = 1.0;  ///< decay rate of cavity 1
  double kappa2 = 1.0;  ///< decay rate of cavity 2
  double dt = 1e-3;     ///< detection interval
  /// Warn threshold on the per-interval click probability 1 - P00. Above
  /// this the one-jump-per-interval picture starts to lose photons.
  double eps_jump = 0.05;
};

/// Feedback amplitudes injected on a detector-1 click and a detector-2
/// click, expressed in the feedback basis.
struct FeedbackConfig {
  complex on_d1_b1{0.0, 0.0};
  complex on_d1_b2{0.0, 0.0};
  complex on_d2_b1{0.0, 0.0};
  complex on_d2_b2{0.0, 0.0};

  bool is_zero() const {
    return on_d1_b1 == complex{} && on_d1_b2 == complex{} &&
           on_d2_b1 == complex{} && on_d2_b2 == complex{};
  }
};

/// The three unitaries tying the bases together, plus the derivative of the
/// feedback-to-detector map with respect to phi1 (the estimated phase).
struct NetworkTransforms {
  BasisTransform feedback_to_cavity;   ///< M_cb
  BasisTransform cavity_to_detector;   ///< M_ac
  BasisTransform feedback_to_detector; ///< M_ab = M_ac M_cb
  /// d(M_ab)/d(phi1); not a unitary, same from/to tagging as M_ab.
  BasisTransform feedback_to_detector_dphi1;
};

/// Build all transforms for the given phases.
NetworkTransforms build_transforms(double phi1, double phi2);

inline NetworkTransforms build_transforms(const NetworkParams& p) {
  return build_transforms(p.phi1, p.phi2);
}

/// Entrywise derivative of the feedback-to-detector map with respect to
/// phi1 at fixed phi2: (1/2) [[-i e^{i phi1}, -e^{i phi1}],
///                            [-e^{i phi1},  i e^{i phi1}]].
BasisTransform transform_derivative(const NetworkParams& p);

/// Re-express `x` in `target` using the appropriate transform (or identity).
ModeAmplitudes change_basis(const ModeAmplitudes& x, Basis target,
                            const NetworkTransforms& t);

}  // namespace cavnet
