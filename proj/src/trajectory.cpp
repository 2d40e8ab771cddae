#include "cavnet/trajectory.hpp"

#include <cmath>
#include <random>

#include "cavnet/rng.hpp"
#include "parallel.hpp"

namespace cavnet {

namespace {

void validate_physics(const NetworkParams& params, double horizon,
                      const RunOptions& options) {
  if (!(params.kappa1 > 0.0) || !(params.kappa2 > 0.0))
    throw ConfigError("decay rates must be positive");
  if (!(params.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (options.record_every < 1)
    throw ConfigError("record_every must be at least 1");
  if (!(options.abort_threshold > 0.0))
    throw ConfigError("abort_threshold must be positive");
}

/// Steps whose index is a multiple of record_every, plus the final step.
std::vector<std::int64_t> grid_steps(std::int64_t steps, int record_every) {
  std::vector<std::int64_t> ks;
  for (std::int64_t k = record_every; k <= steps; k += record_every)
    ks.push_back(k);
  if (ks.empty() || ks.back() != steps) ks.push_back(steps);
  return ks;
}

}  // namespace

std::int64_t step_count(double horizon, double dt) {
  // The tolerance keeps horizon = k dt at exactly k steps despite the
  // rounding in the division.
  return static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
}

std::size_t grid_index(const std::vector<double>& grid, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - t) <= tol) return i;
  }
  throw GridError("time " + std::to_string(t) + " is not on the sample grid");
}

TrajectoryRecord simulate_trajectory(const ModeAmplitudes& initial,
                                     const NetworkParams& params,
                                     const FeedbackConfig& feedback,
                                     double horizon, std::uint64_t seed,
                                     const RunOptions& options) {
  validate_physics(params, horizon, options);

  const NetworkTransforms transforms = build_transforms(params);
  const ModeAmplitudes det = change_basis(initial, Basis::Detector, transforms);
  const StepContext ctx = make_step_context(params, feedback, transforms);

  const std::int64_t steps = step_count(horizon, params.dt);
  if (steps < 1) throw ConfigError("horizon is shorter than one step");
  const std::vector<std::int64_t> ks = grid_steps(steps, options.record_every);

  TrajectoryRecord rec;
  rec.seed = seed;
  rec.grid.reserve(ks.size() + 1);
  rec.counts_d1.reserve(ks.size() + 1);
  rec.counts_d2.reserve(ks.size() + 1);
  if (options.keep_population) rec.population_d2.reserve(ks.size() + 1);

  complex a1 = det.a1;
  complex a2 = det.a2;
  std::int64_t c1 = 0;
  std::int64_t c2 = 0;

  auto record_point = [&](double t) {
    rec.grid.push_back(t);
    rec.counts_d1.push_back(c1);
    rec.counts_d2.push_back(c2);
    if (options.keep_population) rec.population_d2.push_back(std::norm(a2));
  };
  record_point(0.0);

  std::mt19937_64 gen(seed);
  std::size_t next_grid = 0;
  for (std::int64_t k = 1; k <= steps; ++k) {
    const EventProbabilities p = step_probabilities(a1, a2, ctx);
    if (p.soundness_warning) rec.jump_warning = true;

    const double u = rng::uniform01(gen);
    DetectionEvent ev;
    if (u < p.p00) {
      ev = DetectionEvent::NoClick;
    } else if (u < p.p00 + p.p01) {
      ev = DetectionEvent::ClickD2;
      ++c2;
    } else if (u < p.p00 + p.p01 + p.p10) {
      ev = DetectionEvent::ClickD1;
      ++c1;
    } else {
      ev = DetectionEvent::ClickBoth;
      ++c1;
      ++c2;
    }
    apply_event_fast(a1, a2, ev, ctx);

    if (std::norm(a1) > options.abort_threshold ||
        std::norm(a2) > options.abort_threshold) {
      rec.aborted = true;
      break;
    }
    if (k == ks[next_grid]) {
      record_point(static_cast<double>(k) * params.dt);
      ++next_grid;
    }
  }

  // An aborted run still reports the full grid; counts and population stay
  // frozen at their values when the guard tripped.
  for (; next_grid < ks.size(); ++next_grid)
    record_point(static_cast<double>(ks[next_grid]) * params.dt);

  rec.final_alpha = ModeAmplitudes{a1, a2, Basis::Detector};
  return rec;
}

void EnsembleStats::add_record(const TrajectoryRecord& r) {
  if (grid.empty()) {
    grid = r.grid;
    joint.assign(grid.size(), {});
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    ++joint[i][pack(r.counts_d1[i], r.counts_d2[i])];
  ++n_traj;
  if (r.aborted) ++aborted;
  if (r.jump_warning) ++jump_warnings;
}

void EnsembleStats::merge_from(const EnsembleStats& other) {
  if (other.n_traj == 0) return;
  if (grid.empty()) {
    grid = other.grid;
    joint.assign(grid.size(), {});
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& [key, cnt] : other.joint[i]) joint[i][key] += cnt;
  n_traj += other.n_traj;
  aborted += other.aborted;
  jump_warnings += other.jump_warnings;
}

std::array<std::array<std::int64_t, 2>, 2> EnsembleStats::exceedance(
    std::size_t grid_idx, std::int64_t threshold) const {
  std::array<std::array<std::int64_t, 2>, 2> n{{{0, 0}, {0, 0}}};
  for (const auto& [key, cnt] : joint.at(grid_idx)) {
    const auto cd1 = static_cast<std::int64_t>(key >> 32);
    const auto cd2 = static_cast<std::int64_t>(key & 0xFFFFFFFFull);
    n[cd1 > threshold ? 1 : 0][cd2 > threshold ? 1 : 0] += cnt;
  }
  return n;
}

std::int64_t EnsembleStats::exceed_tally(std::size_t grid_idx,
                                         std::int64_t threshold,
                                         int which) const {
  std::int64_t tally = 0;
  for (const auto& [key, cnt] : joint.at(grid_idx)) {
    const auto cd1 = static_cast<std::int64_t>(key >> 32);
    const auto cd2 = static_cast<std::int64_t>(key & 0xFFFFFFFFull);
    const std::int64_t v = which == 0 ? cd1 : which == 1 ? cd2 : cd1 + cd2;
    if (v > threshold) tally += cnt;
  }
  return tally;
}

EnsembleStats simulate_ensemble(const ModeAmplitudes& initial,
                                const NetworkParams& params,
                                const FeedbackConfig& feedback,
                                double horizon, std::int64_t n_traj,
                                std::uint64_t master_seed, int workers,
                                const RunOptions& options) {
  if (n_traj < 1) throw ConfigError("n_traj must be at least 1");
  RunOptions opts = options;
  opts.keep_population = false;  // tallies never look at the series

  const int n_workers = detail::resolve_workers(workers);
  std::vector<EnsembleStats> partial(n_workers);
  detail::parallel_items(n_traj, n_workers, [&](int w, std::int64_t i) {
    partial[w].add_record(simulate_trajectory(initial, params, feedback,
                                              horizon,
                                              rng::child_seed(master_seed, i),
                                              opts));
  });

  EnsembleStats stats;
  for (const auto& p : partial) stats.merge_from(p);
  return stats;
}

std::vector<TrajectoryRecord> simulate_records(
    const ModeAmplitudes& initial, const NetworkParams& params,
    const FeedbackConfig& feedback, double horizon, std::int64_t n_traj,
    std::uint64_t master_seed, int workers, const RunOptions& options) {
  if (n_traj < 1) throw ConfigError("n_traj must be at least 1");
  std::vector<TrajectoryRecord> records(n_traj);
  detail::parallel_items(
      n_traj, detail::resolve_workers(workers), [&](int, std::int64_t i) {
        records[i] = simulate_trajectory(initial, params, feedback, horizon,
                                         rng::child_seed(master_seed, i),
                                         options);
      });
  return records;
}

TrajectoryClass classify_trajectory(const TrajectoryRecord& record,
                                    std::int64_t threshold, double t,
                                    CountSelector which) {
  const std::size_t i = grid_index(record.grid, t);
  std::int64_t v = 0;
  switch (which) {
    case CountSelector::D1: v = record.counts_d1[i]; break;
    case CountSelector::D2: v = record.counts_d2[i]; break;
    case CountSelector::Total: v = record.counts_d1[i] + record.counts_d2[i];
  }
  return v > threshold ? TrajectoryClass::AboveThreshold
                       : TrajectoryClass::BelowThreshold;
}

}  // namespace cavnet
