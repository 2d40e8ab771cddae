#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cavnet/dynamics.hpp"
#include "cavnet/network.hpp"

namespace cavnet {

/// Knobs of a single run that are not physics: sampling grid, overflow
/// guard, and whether the |alpha2|^2 series is kept.
struct RunOptions {
  /// Counts are sampled every this many steps (plus the final step).
  int record_every = 100;
  /// Hard abort when either |alpha_i|^2 exceeds this; divergence is
  /// physical here but floating-point overflow is not.
  double abort_threshold = 1e12;
  bool keep_population = true;
};

/// One sampled detection record on a time grid.
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<double> grid;            ///< sample times, starts at 0
  std::vector<std::int64_t> counts_d1; ///< cumulative clicks per grid time
  std::vector<std::int64_t> counts_d2;
  std::vector<double> population_d2;   ///< |alpha2(t)|^2, empty if not kept
  ModeAmplitudes final_alpha;          ///< detector basis, at the last step
  bool aborted = false;        ///< overflow guard tripped; counts frozen
  bool jump_warning = false;   ///< some interval exceeded eps_jump
};

/// Index of the grid entry matching time t within a relative tolerance of
/// 1e-9. Throws GridError when t is not on the grid.
std::size_t grid_index(const std::vector<double>& grid, double t);

/// Number of dt-steps covering `horizon` (final partial step rounds up,
/// with a tolerance so horizon = k dt does not gain a step).
std::int64_t step_count(double horizon, double dt);

/// Integer tallies over an ensemble, per grid time. Everything downstream
/// (threshold probabilities, exceedance joints) is derived from the joint
/// count histogram, so merges are commutative and results do not depend on
/// how trajectories were distributed over workers.
struct EnsembleStats {
  std::int64_t n_traj = 0;
  std::vector<double> grid;
  /// Per grid time: map from packed (counts_d1 << 32 | counts_d2) to the
  /// number of trajectories with exactly those cumulative counts.
  std::vector<std::unordered_map<std::uint64_t, std::int64_t>> joint;
  std::int64_t aborted = 0;
  std::int64_t jump_warnings = 0;

  static std::uint64_t pack(std::int64_t c1, std::int64_t c2) {
    return (static_cast<std::uint64_t>(c1) << 32) |
           static_cast<std::uint64_t>(c2);
  }

  void add_record(const TrajectoryRecord& r);
  /// Merge another partial tally. Pure integer addition, order-free.
  void merge_from(const EnsembleStats& other);

  /// Joint exceedance tallies at one grid time: n[i][j] counts trajectories
  /// with (counts_d1 > threshold) == i and (counts_d2 > threshold) == j.
  std::array<std::array<std::int64_t, 2>, 2> exceedance(
      std::size_t grid_idx, std::int64_t threshold) const;

  /// Trajectories whose selected count exceeds threshold at grid_idx.
  /// which: 0 = detector 1, 1 = detector 2, 2 = total.
  std::int64_t exceed_tally(std::size_t grid_idx, std::int64_t threshold,
                            int which) const;
};

/// Sample one trajectory. The initial state may be given in any basis; it
/// is re-expressed at the detectors before stepping. Fully deterministic
/// given (seed, params, feedback, horizon, options).
TrajectoryRecord simulate_trajectory(const ModeAmplitudes& initial,
                                     const NetworkParams& params,
                                     const FeedbackConfig& feedback,
                                     double horizon, std::uint64_t seed,
                                     const RunOptions& options = {});

/// Sample n_traj trajectories with child seeds split off master_seed and
/// aggregate tallies. Bit-identical for any worker count.
EnsembleStats simulate_ensemble(const ModeAmplitudes& initial,
                                const NetworkParams& params,
                                const FeedbackConfig& feedback,
                                double horizon, std::int64_t n_traj,
                                std::uint64_t master_seed, int workers,
                                const RunOptions& options = {});

/// Like simulate_ensemble but keeping every record (for trajectory dumps).
/// Records are returned in trajectory-index order regardless of workers.
std::vector<TrajectoryRecord> simulate_records(
    const ModeAmplitudes& initial, const NetworkParams& params,
    const FeedbackConfig& feedback, double horizon, std::int64_t n_traj,
    std::uint64_t master_seed, int workers, const RunOptions& options = {});

enum class TrajectoryClass { AboveThreshold, BelowThreshold };

/// Which count a threshold classification or signal looks at.
enum class CountSelector { D1 = 0, D2 = 1, Total = 2 };

/// Compare the selected cumulative count at time t (which must lie on the
/// record's grid) against the threshold.
TrajectoryClass classify_trajectory(const TrajectoryRecord& record,
                                    std::int64_t threshold, double t,
                                    CountSelector which = CountSelector::Total);

}  // namespace cavnet
