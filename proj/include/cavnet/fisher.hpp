#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cavnet/dynamics.hpp"
#include "cavnet/network.hpp"

namespace cavnet {

/// Limits and extras for exhaustive record enumeration.
struct EnumerationOptions {
  int workers = 1;
  /// Hard cap on the record length; 4^N nodes must stay enumerable.
  int n_cap = 14;
  /// Strings with probability below this floor have the denominator of
  /// (dP)^2 / P clamped to it; when both P and |dP| are below, the string
  /// is skipped outright. Far below any meaningful probability here.
  double probability_floor = 1e-30;
  /// Keep P and dP for every full-length string (index = base-4 digits of
  /// the record, first step most significant). Capped at N <= 10.
  bool collect_leaves = false;
  /// Accumulate the joint distribution of the last three steps.
  bool collect_m3 = false;
};

/// Exhaustive sweep of the 4-ary detection-record tree to depth n_steps.
/// One pass yields the Fisher information of every record length d <= N,
/// since each depth-d node carries the probability of one length-d record.
struct EnumerationResult {
  int n_steps = 0;
  /// fisher[d-1] = sum over all 4^d records of (dP/dphi1)^2 / P.
  std::vector<double> fisher;
  /// total_probability[d-1] = sum of P over depth d; 1 up to rounding.
  std::vector<double> total_probability;
  /// Only when collect_leaves: P and dP per full-length record.
  std::vector<double> leaf_probability;
  std::vector<double> leaf_derivative;
  /// Only when collect_m3: m3[a][b][c] = P(x_{N-2}=a, x_{N-1}=b, x_N=c).
  std::array<std::array<std::array<double, 4>, 4>, 4> m3{};
};

EnumerationResult enumerate_records(const ModeAmplitudes& initial,
                                    const NetworkParams& params,
                                    const FeedbackConfig& feedback,
                                    int n_steps,
                                    const EnumerationOptions& options = {});

/// Probability of one specific detection record and its derivative with
/// respect to phi1, by forward-mode propagation through every step.
std::pair<double, double> string_probability_with_derivative(
    const std::vector<DetectionEvent>& events, const ModeAmplitudes& initial,
    const NetworkParams& params, const FeedbackConfig& feedback);

/// Fisher information of records of exactly n_steps intervals.
/// Checks completeness (enumerated probabilities sum to 1 within 1e-10)
/// before returning.
double fisher_information(const ModeAmplitudes& initial,
                          const NetworkParams& params,
                          const FeedbackConfig& feedback, int n_steps,
                          const EnumerationOptions& options = {});

/// Largest difference between one-step and two-step conditionals,
/// max over (a, b, c) of |p(x_N=c | x_{N-1}=b) - p(x_N=c | x_{N-1}=b,
/// x_{N-2}=a)|, from the enumerated joint distribution. Zero means the
/// record statistics look Markovian at this depth.
double markov_gap(const ModeAmplitudes& initial, const NetworkParams& params,
                  const FeedbackConfig& feedback, int n_steps,
                  const EnumerationOptions& options = {});

/// Least-squares fit of F(N) = a N^2 + b N (no constant term).
struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  /// False when every F is zero: the record carries no phase information
  /// and no bound can be extrapolated.
  bool has_information = false;
};

ScalingFit fit_quadratic_scaling(const std::vector<int>& n_values,
                                 const std::vector<double>& fisher);

/// Fitted Fisher information extrapolated to time t (N = t / dt).
double extrapolated_fisher(const ScalingFit& fit, double t, double dt);

/// F(N) for N = 1..n_max plus the scaling fit, from a single enumeration.
struct FisherResult {
  double dt = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  std::vector<int> n_values;
  std::vector<double> fisher;
  ScalingFit fit;
};

/// Fit excludes N = 1 when n_max >= 3 (F(1) = 0 identically under the
/// fixed-phi2 convention, so it carries no scaling information).
FisherResult fisher_scaling(const ModeAmplitudes& initial,
                            const NetworkParams& params,
                            const FeedbackConfig& feedback, int n_max,
                            const EnumerationOptions& options = {});

}  // namespace cavnet
