#include "cavnet/estimator.hpp"

#include <cmath>

#include "cavnet/rng.hpp"
#include "parallel.hpp"

namespace cavnet {

const char* observable_name(Observable o) {
  switch (o) {
    case Observable::P_d1: return "P_d1";
    case Observable::P_d2: return "P_d2";
    case Observable::P_d1_minus_P_d2: return "P_d1_minus_P_d2";
  }
  return "?";
}

SignalPoint threshold_signal(const EnsembleStats& stats, CountSelector which,
                             std::int64_t threshold, double t) {
  const std::size_t idx = grid_index(stats.grid, t);
  const auto n = static_cast<double>(stats.n_traj);
  const double p =
      static_cast<double>(stats.exceed_tally(idx, threshold,
                                             static_cast<int>(which))) /
      n;
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p) / n))};
}

SignalPoint observable_signal(const EnsembleStats& stats, Observable obs,
                              std::int64_t threshold, double t) {
  if (obs == Observable::P_d1)
    return threshold_signal(stats, CountSelector::D1, threshold, t);
  if (obs == Observable::P_d2)
    return threshold_signal(stats, CountSelector::D2, threshold, t);

  // Difference of indicators: the variance comes from the exact joint
  // distribution of (exceed_d1, exceed_d2), not from adding the two
  // binomial errors (the indicators are correlated).
  const std::size_t idx = grid_index(stats.grid, t);
  const auto ex = stats.exceedance(idx, threshold);
  const auto n = static_cast<double>(stats.n_traj);
  const double mean = static_cast<double>(ex[1][0] - ex[0][1]) / n;
  const double second = static_cast<double>(ex[1][0] + ex[0][1]) / n;
  const double var = std::max(0.0, second - mean * mean);
  return {mean, std::sqrt(var / n)};
}

SignalCurve signal_scan(const ModeAmplitudes& initial,
                        const NetworkParams& params_template,
                        const FeedbackConfig& feedback,
                        const std::vector<double>& phi_grid,
                        const std::vector<double>& times,
                        const std::vector<Observable>& observables,
                        std::int64_t threshold, std::int64_t n_traj,
                        std::uint64_t master_seed, int workers,
                        const RunOptions& options) {
  if (phi_grid.empty()) throw ConfigError("phase grid is empty");
  if (times.empty()) throw ConfigError("no sample times requested");

  double horizon = 0.0;
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("sample times must be positive");
    horizon = std::max(horizon, t);
  }

  SignalCurve curve;
  curve.threshold = threshold;
  curve.n_traj = n_traj;
  curve.master_seed = master_seed;
  curve.points.reserve(phi_grid.size() * times.size() * observables.size());

  for (double phi : phi_grid) {
    NetworkParams params = params_template;
    params.phi1 = phi;  // phi_tilde = phi1 - phi2 with phi2 held fixed
    const EnsembleStats stats =
        simulate_ensemble(initial, params, feedback, horizon, n_traj,
                          master_seed, workers, options);
    curve.aborted += stats.aborted;
    curve.jump_warnings += stats.jump_warnings;
    for (double t : times) {
      for (Observable obs : observables) {
        const SignalPoint sp = observable_signal(stats, obs, threshold, t);
        curve.points.push_back({phi, sp.value, sp.stderr_, t, obs});
      }
    }
  }
  return curve;
}

namespace {

/// Integer tallies a worker accumulates while pairing trajectories at
/// phi_star - delta, phi_star, phi_star + delta under one child seed.
/// Everything downstream is derived from these, so merging partials in any
/// order gives identical results.
struct PairedTallies {
  // At phi_star, per (subensemble, time): exceedance counts per detector.
  std::vector<std::int64_t> sub_d1;
  std::vector<std::int64_t> sub_d2;
  // Per (time, observable): sums of the per-trajectory indicator
  // difference between the two offset phases, and of its square.
  std::vector<std::int64_t> dsum;
  std::vector<std::int64_t> dsq;

  void init(std::size_t n_sub, std::size_t n_times) {
    sub_d1.assign(n_sub * n_times, 0);
    sub_d2.assign(n_sub * n_times, 0);
    dsum.assign(n_times * 3, 0);
    dsq.assign(n_times * 3, 0);
  }

  void merge_from(const PairedTallies& o) {
    for (std::size_t i = 0; i < sub_d1.size(); ++i) sub_d1[i] += o.sub_d1[i];
    for (std::size_t i = 0; i < sub_d2.size(); ++i) sub_d2[i] += o.sub_d2[i];
    for (std::size_t i = 0; i < dsum.size(); ++i) dsum[i] += o.dsum[i];
    for (std::size_t i = 0; i < dsq.size(); ++i) dsq[i] += o.dsq[i];
  }
};

}  // namespace

UncertaintyResult phase_uncertainty(const ModeAmplitudes& initial,
                                    const NetworkParams& params_template,
                                    const FeedbackConfig& feedback,
                                    double phi_star, double delta_phi,
                                    const std::vector<double>& times,
                                    std::int64_t n_subensembles,
                                    std::int64_t n_traj_per_sub,
                                    std::int64_t threshold,
                                    std::uint64_t master_seed, int workers,
                                    const RunOptions& options) {
  if (!(delta_phi > 0.0)) throw ConfigError("delta_phi must be positive");
  if (n_subensembles < 2)
    throw ConfigError("need at least 2 subensembles for a variance");
  if (n_traj_per_sub < 1) throw ConfigError("n_traj_per_sub must be >= 1");
  if (times.empty()) throw ConfigError("no sample times requested");

  double horizon = 0.0;
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("sample times must be positive");
    horizon = std::max(horizon, t);
  }

  NetworkParams at_star = params_template;
  at_star.phi1 = phi_star;
  NetworkParams at_plus = params_template;
  at_plus.phi1 = phi_star + delta_phi;
  NetworkParams at_minus = params_template;
  at_minus.phi1 = phi_star - delta_phi;

  RunOptions opts = options;
  opts.keep_population = false;

  const std::size_t n_times = times.size();
  const std::int64_t n_total = n_subensembles * n_traj_per_sub;
  const int n_workers = detail::resolve_workers(workers);

  std::vector<PairedTallies> partial(n_workers);
  for (auto& p : partial) p.init(n_subensembles, n_times);

  std::vector<std::size_t> grid_idx;  // resolved once, reused per trajectory
  {
    const TrajectoryRecord probe = simulate_trajectory(
        initial, at_star, feedback, horizon, rng::child_seed(master_seed, 0),
        opts);
    grid_idx.reserve(n_times);
    for (double t : times) grid_idx.push_back(grid_index(probe.grid, t));
  }

  detail::parallel_items(n_total, n_workers, [&](int w, std::int64_t i) {
    const std::uint64_t seed = rng::child_seed(master_seed, i);
    const TrajectoryRecord star =
        simulate_trajectory(initial, at_star, feedback, horizon, seed, opts);
    const TrajectoryRecord plus =
        simulate_trajectory(initial, at_plus, feedback, horizon, seed, opts);
    const TrajectoryRecord minus =
        simulate_trajectory(initial, at_minus, feedback, horizon, seed, opts);

    PairedTallies& tal = partial[w];
    const std::size_t sub = static_cast<std::size_t>(i / n_traj_per_sub);
    for (std::size_t ti = 0; ti < n_times; ++ti) {
      const std::size_t g = grid_idx[ti];
      const int s1 = star.counts_d1[g] > threshold ? 1 : 0;
      const int s2 = star.counts_d2[g] > threshold ? 1 : 0;
      tal.sub_d1[sub * n_times + ti] += s1;
      tal.sub_d2[sub * n_times + ti] += s2;

      const int p1 = plus.counts_d1[g] > threshold ? 1 : 0;
      const int p2 = plus.counts_d2[g] > threshold ? 1 : 0;
      const int m1 = minus.counts_d1[g] > threshold ? 1 : 0;
      const int m2 = minus.counts_d2[g] > threshold ? 1 : 0;
      const int d[3] = {p1 - m1, p2 - m2, (p1 - p2) - (m1 - m2)};
      for (int o = 0; o < 3; ++o) {
        tal.dsum[ti * 3 + o] += d[o];
        tal.dsq[ti * 3 + o] += d[o] * d[o];
      }
    }
  });

  PairedTallies total;
  total.init(n_subensembles, n_times);
  for (const auto& p : partial) total.merge_from(p);

  UncertaintyResult result;
  result.phi_star = phi_star;
  result.delta_phi = delta_phi;
  result.n_subensembles = n_subensembles;
  result.n_traj_per_sub = n_traj_per_sub;
  result.threshold = threshold;
  result.master_seed = master_seed;
  result.points.reserve(n_times * 3);

  const auto n_per = static_cast<double>(n_traj_per_sub);
  const auto n_all = static_cast<double>(n_total);
  const Observable obs_order[3] = {Observable::P_d1, Observable::P_d2,
                                   Observable::P_d1_minus_P_d2};

  for (std::size_t ti = 0; ti < n_times; ++ti) {
    for (int o = 0; o < 3; ++o) {
      UncertaintyPoint pt;
      pt.time = times[ti];
      pt.observable = obs_order[o];

      // Subensemble observable values at phi_star and their spread.
      double mean = 0.0;
      std::vector<double> values(n_subensembles);
      for (std::int64_t s = 0; s < n_subensembles; ++s) {
        const std::int64_t k1 = total.sub_d1[s * n_times + ti];
        const std::int64_t k2 = total.sub_d2[s * n_times + ti];
        const std::int64_t k = o == 0 ? k1 : o == 1 ? k2 : k1 - k2;
        values[s] = static_cast<double>(k) / n_per;
        mean += values[s];
      }
      mean /= static_cast<double>(n_subensembles);
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      pt.mean = mean;
      pt.variance = ss / static_cast<double>(n_subensembles - 1);

      // Central difference of the full-ensemble mean, with its paired
      // standard error.
      const auto dsum = static_cast<double>(total.dsum[ti * 3 + o]);
      const auto dsq = static_cast<double>(total.dsq[ti * 3 + o]);
      pt.gradient = dsum / (n_all * 2.0 * delta_phi);
      const double var_d =
          n_total > 1
              ? std::max(0.0, (dsq - dsum * dsum / n_all) / (n_all - 1.0))
              : 0.0;
      pt.gradient_stderr = std::sqrt(var_d / n_all) / (2.0 * delta_phi);

      pt.zero_gradient = std::abs(pt.gradient) <= pt.gradient_stderr;
      pt.delta_phi_sq =
          pt.zero_gradient ? 0.0 : pt.variance / (pt.gradient * pt.gradient);
      result.points.push_back(pt);
    }
  }
  return result;
}

}  // namespace cavnet
