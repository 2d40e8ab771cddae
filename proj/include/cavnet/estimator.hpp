#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavnet/trajectory.hpp"

namespace cavnet {

/// The three measurement signals read off an ensemble: per-detector
/// threshold-exceedance probabilities and their difference.
enum class Observable { P_d1 = 0, P_d2 = 1, P_d1_minus_P_d2 = 2 };

const char* observable_name(Observable o);

/// Exceedance probability of one detector (or the total) with its binomial
/// standard error sqrt(p (1-p) / n).
struct SignalPoint {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// P(count > threshold) at time t for the selected detector.
SignalPoint threshold_signal(const EnsembleStats& stats, CountSelector which,
                             std::int64_t threshold, double t);

/// Observable value at time t. For the difference observable the standard
/// error comes from the exact per-trajectory variance of the indicator
/// difference, computed from the joint exceedance tallies.
SignalPoint observable_signal(const EnsembleStats& stats, Observable obs,
                              std::int64_t threshold, double t);

/// One row of a signal scan.
struct SignalSample {
  double phi_tilde = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  double time = 0.0;
  Observable observable = Observable::P_d1;
};

/// A family of signal curves over a phase grid. All rows share the
/// threshold, trajectory count, and master seed; the same seeds are reused
/// at every grid point (common random numbers), so curves stay smooth and
/// pointwise identities between observables hold exactly.
struct SignalCurve {
  std::vector<SignalSample> points;  ///< phi outer, time middle, observable inner
  std::int64_t threshold = 5;
  std::int64_t n_traj = 0;
  std::uint64_t master_seed = 0;
  std::int64_t aborted = 0;
  std::int64_t jump_warnings = 0;
};

/// Scan phi_tilde over `phi_grid` (phi1 = phi_tilde, phi2 from the
/// template), run one ensemble per grid point, and extract every requested
/// (time, observable) pair from it.
SignalCurve signal_scan(const ModeAmplitudes& initial,
                        const NetworkParams& params_template,
                        const FeedbackConfig& feedback,
                        const std::vector<double>& phi_grid,
                        const std::vector<double>& times,
                        const std::vector<Observable>& observables,
                        std::int64_t threshold, std::int64_t n_traj,
                        std::uint64_t master_seed, int workers,
                        const RunOptions& options = {});

/// Uncertainty of a phase estimate built on one observable at one time,
/// by error propagation: variance of the observable across subensembles
/// over the squared gradient of its mean.
struct UncertaintyPoint {
  double time = 0.0;
  Observable observable = Observable::P_d1;
  double mean = 0.0;          ///< observable mean over all trajectories
  double variance = 0.0;      ///< sample variance across subensembles
  double gradient = 0.0;      ///< d<O>/d phi_tilde, central difference
  double gradient_stderr = 0.0;
  double delta_phi_sq = 0.0;  ///< variance / gradient^2; meaningless if flagged
  /// Gradient indistinguishable from zero (|gradient| <= its standard
  /// error); the uncertainty is unbounded rather than delta_phi_sq.
  bool zero_gradient = false;
};

struct UncertaintyResult {
  double phi_star = 0.0;
  double delta_phi = 0.0;
  std::int64_t n_subensembles = 0;
  std::int64_t n_traj_per_sub = 0;
  std::int64_t threshold = 5;
  std::uint64_t master_seed = 0;
  std::vector<UncertaintyPoint> points;  ///< time outer, observable inner
};

/// Estimate (delta phi)^2 at phi_tilde = phi_star for each requested time
/// and observable. The variance comes from n_subensembles independent
/// subensembles of n_traj_per_sub trajectories at phi_star; the gradient
/// from a central difference at phi_star +- delta_phi with common random
/// numbers (trajectory i uses the same child seed at both phases, so the
/// per-trajectory indicator difference has most of the noise cancelled).
UncertaintyResult phase_uncertainty(const ModeAmplitudes& initial,
                                    const NetworkParams& params_template,
                                    const FeedbackConfig& feedback,
                                    double phi_star, double delta_phi,
                                    const std::vector<double>& times,
                                    std::int64_t n_subensembles,
                                    std::int64_t n_traj_per_sub,
                                    std::int64_t threshold,
                                    std::uint64_t master_seed, int workers,
                                    const RunOptions& options = {});

}  // namespace cavnet
