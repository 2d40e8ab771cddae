#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavnet/estimator.hpp"
#include "cavnet/network.hpp"
#include "cavnet/trajectory.hpp"

namespace cavnet {

/// How the initial state is prepared: explicit cavity amplitudes, or the
/// vacuum displaced by one feedback pulse carrying both beta vectors.
enum class InitialMode { Explicit, FeedbackPulse };

/// [scan] section: the phase grid and readout settings of a signal run.
struct ScanConfig {
  double phi_start = -3.141592653589793;
  double phi_stop = 3.141592653589793;
  std::int64_t phi_points = 21;
  std::vector<double> times{0.5, 1.0, 10.0};
  std::int64_t threshold = 5;
  std::vector<Observable> observables{Observable::P_d1, Observable::P_d2,
                                      Observable::P_d1_minus_P_d2};

  std::vector<double> phi_grid() const;
};

/// [uncertainty] section: error-propagation settings.
struct UncertaintyConfig {
  double phi_star = 0.3141592653589793;
  double delta_phi = 0.05;
  std::vector<double> times{2.0, 5.0, 10.0};
  std::int64_t n_subensembles = 10;
  std::int64_t n_traj_per_sub = 1000;
  std::int64_t threshold = 5;
};

/// [fisher] section: enumeration depth and bound sample times.
struct FisherConfig {
  int n_max = 12;
  /// Step used for enumeration; 0 means inherit the network dt.
  double dt = 0.0;
  std::vector<double> times{2.0, 5.0, 10.0};
  int n_cap = 14;
};

/// Fully resolved run configuration, one per config file.
struct RunConfig {
  NetworkParams network;
  FeedbackConfig feedback;
  InitialMode initial_mode = InitialMode::Explicit;
  complex gamma1{1.0, 0.0};
  complex gamma2{1.0, 0.0};
  double horizon = 10.0;
  std::int64_t n_traj = 1;
  RunOptions run;
  std::uint64_t master_seed = 0;  ///< mandatory in every config file
  int workers = 0;                ///< 0 means use hardware concurrency
  ScanConfig scan;
  UncertaintyConfig uncertainty;
  FisherConfig fisher;
};

/// Parse "re+imi" (e.g. "1+0i", "-0.5-2i"); a bare real is accepted too.
complex parse_complex(const std::string& text);
std::string format_complex(complex v);

/// Exact decimal form of a double (17 significant digits).
std::string format_double(double v);

/// Parse the plain-text section/key format. Unknown sections or keys are
/// errors; master_seed is required. Throws ConfigError.
RunConfig parse_config_text(const std::string& text);

/// parse_config_text over a file. Throws IoError when unreadable.
RunConfig parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(c)) reproduces c exactly, except
/// workers, which is execution detail and never serialized (outputs must
/// not depend on the worker count).
std::string serialize_config(const RunConfig& c);

/// Initial amplitudes in a phase-independent representation: explicit mode
/// yields cavity-basis gammas; feedback-pulse mode yields the summed beta
/// vector tagged with the feedback basis (the engine re-expresses it at
/// the detectors with whatever phases the run uses).
ModeAmplitudes initial_state(const RunConfig& c);

}  // namespace cavnet
