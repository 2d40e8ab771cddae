#pragma once

#include <string>
#include <vector>

#include "cavnet/config.hpp"
#include "cavnet/estimator.hpp"
#include "cavnet/fisher.hpp"
#include "cavnet/trajectory.hpp"

namespace cavnet {

/// Every emitted file starts with the resolved config as '#'-prefixed
/// comment lines, so outputs are self-describing and reruns are comparable
/// byte for byte (no timestamps anywhere).
std::string config_echo_comment(const RunConfig& c);

/// Per-record CSV blocks with columns (time, counts_d1, counts_d2, pop_d2);
/// records are separated by a comment line carrying index and seed.
std::string trajectories_csv(const std::vector<TrajectoryRecord>& records,
                             const RunConfig& c);

/// One row per (phi_tilde, time, observable):
/// (phi_tilde, value, stderr, time, observable, threshold, n_traj, seed).
std::string signal_csv(const SignalCurve& curve, const RunConfig& c);

/// Uncertainty results as JSON with full provenance. When `bound` is
/// non-null its extrapolated reciprocal Fisher information is sampled at
/// the uncertainty times and embedded.
std::string uncertainty_json(const UncertaintyResult& u, const RunConfig& c,
                             const FisherResult* bound);

/// CSV companion of uncertainty_json, one row per (time, observable).
std::string uncertainty_csv(const UncertaintyResult& u, const RunConfig& c,
                            const FisherResult* bound);

/// Fisher scaling as JSON: per-N values, fit, and bound samples at the
/// configured times.
std::string fisher_json(const FisherResult& f, const RunConfig& c);

/// CSV of (N, F) pairs.
std::string fisher_csv(const FisherResult& f, const RunConfig& c);

/// Parse a fisher_json document back into a FisherResult (used to feed the
/// bound into an uncertainty run). Throws IoError on unreadable files and
/// ConfigError on malformed content.
FisherResult read_fisher_json(const std::string& path);

/// Write full contents to path, throwing IoError on any failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cavnet
