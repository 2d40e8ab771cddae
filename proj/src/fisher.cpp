#include "cavnet/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace cavnet {

namespace {

/// Detector-basis root with the phi1 derivative of the initial amplitudes.
/// Explicit cavity (or detector) amplitudes do not depend on phi1; a
/// feedback-basis initial state reaches the detectors through M_ab and so
/// inherits its derivative.
StateWithDerivative make_root(const ModeAmplitudes& initial,
                              const NetworkTransforms& transforms) {
  StateWithDerivative s;
  s.alpha = change_basis(initial, Basis::Detector, transforms);
  if (initial.basis == Basis::Feedback) {
    const ModeAmplitudes d = transforms.feedback_to_detector_dphi1.apply(initial);
    s.dalpha1 = d.a1;
    s.dalpha2 = d.a2;
  }
  return s;
}

struct Node {
  StateWithDerivative state;
  double P = 1.0;
  double dP = 0.0;
};

/// Per-depth compensated accumulators, index d-1 for depth d.
struct Accumulators {
  std::vector<detail::NeumaierSum> fisher;
  std::vector<detail::NeumaierSum> sump;
  std::array<std::array<std::array<double, 4>, 4>, 4> m3{};

  explicit Accumulators(int n) : fisher(n), sump(n) {}
};

struct TreeWalk {
  const StepContext* ctx = nullptr;
  const EnumerationOptions* opts = nullptr;
  int n_steps = 0;
  Accumulators* acc = nullptr;
  double* leaf_p = nullptr;   // may be null
  double* leaf_dp = nullptr;
  std::int64_t next_leaf = 0;

  /// Expand all children of `node` (a string of length `depth`), record
  /// their contributions, and recurse. prev1 is the last event on the path.
  void expand(const Node& node, int depth, int prev2, int prev1) {
    const EventProbabilities p =
        step_probabilities(node.state.alpha.a1, node.state.alpha.a2, *ctx);
    const std::array<double, 4> dp =
        step_probability_derivatives(node.state, *ctx, p);
    for (int x = 0; x < 4; ++x) {
      Node child;
      child.state = node.state;
      apply_event_with_derivative(child.state, static_cast<DetectionEvent>(x),
                                  *ctx);
      child.P = node.P * p[x];
      child.dP = node.dP * p[x] + node.P * dp[x];

      const int d = depth + 1;
      acc->sump[d - 1].add(child.P);
      const double floor = opts->probability_floor;
      if (child.P >= floor) {
        acc->fisher[d - 1].add(child.dP * child.dP / child.P);
      } else if (std::abs(child.dP) >= floor) {
        acc->fisher[d - 1].add(child.dP * child.dP / floor);
      }
      if (d == n_steps) {
        if (leaf_p) {
          leaf_p[next_leaf] = child.P;
          leaf_dp[next_leaf] = child.dP;
          ++next_leaf;
        }
        if (opts->collect_m3) acc->m3[prev2][prev1][x] += child.P;
      } else {
        expand(child, d, prev1, x);
      }
    }
  }
};

}  // namespace

EnumerationResult enumerate_records(const ModeAmplitudes& initial,
                                    const NetworkParams& params,
                                    const FeedbackConfig& feedback,
                                    int n_steps,
                                    const EnumerationOptions& options) {
  if (n_steps < 1) throw ConfigError("record length must be at least 1");
  if (n_steps > options.n_cap) {
    throw BudgetError("record length " + std::to_string(n_steps) +
                      " exceeds the enumeration cap " +
                      std::to_string(options.n_cap) + " (4^N strings)");
  }
  if (options.collect_leaves && n_steps > 10) {
    throw BudgetError("per-string storage is capped at 10 steps");
  }
  if (options.collect_m3 && n_steps < 3) {
    throw ConfigError("last-three-step statistics need at least 3 steps");
  }

  const NetworkTransforms transforms = build_transforms(params);
  const StepContext ctx = make_step_context(params, feedback, transforms);

  EnumerationResult result;
  result.n_steps = n_steps;

  Node root;
  root.state = make_root(initial, transforms);

  const std::int64_t n_leaves = std::int64_t{1} << (2 * n_steps);
  if (options.collect_leaves) {
    result.leaf_probability.assign(n_leaves, 0.0);
    result.leaf_derivative.assign(n_leaves, 0.0);
  }

  Accumulators serial_acc(n_steps);
  TreeWalk serial;
  serial.ctx = &ctx;
  serial.opts = &options;
  serial.n_steps = n_steps;
  serial.acc = &serial_acc;
  serial.leaf_p =
      options.collect_leaves ? result.leaf_probability.data() : nullptr;
  serial.leaf_dp =
      options.collect_leaves ? result.leaf_derivative.data() : nullptr;

  // Depths 1 and 2 are handled serially; each depth-2 node then roots an
  // independent subtree. Partials merge in fixed prefix order, so the
  // result is identical for every worker count.
  struct Prefix {
    Node node;
    int x1 = 0;
    int x2 = 0;
  };
  std::vector<Prefix> frontier;

  if (n_steps <= 2) {
    serial.expand(root, 0, 0, 0);
  } else {
    const EventProbabilities p0 =
        step_probabilities(root.state.alpha.a1, root.state.alpha.a2, ctx);
    const std::array<double, 4> dp0 =
        step_probability_derivatives(root.state, ctx, p0);
    for (int x1 = 0; x1 < 4; ++x1) {
      Node n1;
      n1.state = root.state;
      apply_event_with_derivative(n1.state, static_cast<DetectionEvent>(x1),
                                  ctx);
      n1.P = p0[x1];
      n1.dP = dp0[x1];
      serial_acc.sump[0].add(n1.P);
      if (n1.P >= options.probability_floor) {
        serial_acc.fisher[0].add(n1.dP * n1.dP / n1.P);
      } else if (std::abs(n1.dP) >= options.probability_floor) {
        serial_acc.fisher[0].add(n1.dP * n1.dP / options.probability_floor);
      }

      const EventProbabilities p1 =
          step_probabilities(n1.state.alpha.a1, n1.state.alpha.a2, ctx);
      const std::array<double, 4> dp1 =
          step_probability_derivatives(n1.state, ctx, p1);
      for (int x2 = 0; x2 < 4; ++x2) {
        Node n2;
        n2.state = n1.state;
        apply_event_with_derivative(n2.state, static_cast<DetectionEvent>(x2),
                                    ctx);
        n2.P = n1.P * p1[x2];
        n2.dP = n1.dP * p1[x2] + n1.P * dp1[x2];
        serial_acc.sump[1].add(n2.P);
        if (n2.P >= options.probability_floor) {
          serial_acc.fisher[1].add(n2.dP * n2.dP / n2.P);
        } else if (std::abs(n2.dP) >= options.probability_floor) {
          serial_acc.fisher[1].add(n2.dP * n2.dP / options.probability_floor);
        }
        frontier.push_back({n2, x1, x2});
      }
    }

    const int n_workers = detail::resolve_workers(options.workers);
    std::vector<Accumulators> task_acc(frontier.size(),
                                       Accumulators(n_steps));
    const std::int64_t leaves_per_task = n_leaves / 16;
    detail::parallel_items(
        static_cast<std::int64_t>(frontier.size()), n_workers,
        [&](int, std::int64_t k) {
          TreeWalk walk;
          walk.ctx = &ctx;
          walk.opts = &options;
          walk.n_steps = n_steps;
          walk.acc = &task_acc[k];
          if (options.collect_leaves) {
            walk.leaf_p = result.leaf_probability.data();
            walk.leaf_dp = result.leaf_derivative.data();
            walk.next_leaf = k * leaves_per_task;
          }
          walk.expand(frontier[k].node, 2, frontier[k].x1, frontier[k].x2);
        });

    for (const auto& ta : task_acc) {
      for (int d = 3; d <= n_steps; ++d) {
        serial_acc.fisher[d - 1].add(ta.fisher[d - 1].value());
        serial_acc.sump[d - 1].add(ta.sump[d - 1].value());
      }
      if (options.collect_m3) {
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) serial_acc.m3[a][b][c] += ta.m3[a][b][c];
      }
    }
  }

  result.fisher.resize(n_steps);
  result.total_probability.resize(n_steps);
  for (int d = 1; d <= n_steps; ++d) {
    result.fisher[d - 1] = serial_acc.fisher[d - 1].value();
    result.total_probability[d - 1] = serial_acc.sump[d - 1].value();
  }
  result.m3 = serial_acc.m3;
  return result;
}

std::pair<double, double> string_probability_with_derivative(
    const std::vector<DetectionEvent>& events, const ModeAmplitudes& initial,
    const NetworkParams& params, const FeedbackConfig& feedback) {
  if (events.empty()) throw std::invalid_argument("empty detection record");

  const NetworkTransforms transforms = build_transforms(params);
  const StepContext ctx = make_step_context(params, feedback, transforms);
  StateWithDerivative s = make_root(initial, transforms);

  double P = 1.0;
  double dP = 0.0;
  for (DetectionEvent ev : events) {
    const EventProbabilities p = step_probabilities(s.alpha.a1, s.alpha.a2, ctx);
    const std::array<double, 4> dp = step_probability_derivatives(s, ctx, p);
    const int x = static_cast<int>(ev);
    dP = dP * p[x] + P * dp[x];
    P *= p[x];
    apply_event_with_derivative(s, ev, ctx);
  }
  return {P, dP};
}

namespace {

void check_completeness(const EnumerationResult& r) {
  for (int d = 1; d <= r.n_steps; ++d) {
    if (std::abs(r.total_probability[d - 1] - 1.0) > 1e-10) {
      throw std::runtime_error(
          "enumerated record probabilities at depth " + std::to_string(d) +
          " sum to " + std::to_string(r.total_probability[d - 1]) +
          ", not 1");
    }
  }
}

}  // namespace

double fisher_information(const ModeAmplitudes& initial,
                          const NetworkParams& params,
                          const FeedbackConfig& feedback, int n_steps,
                          const EnumerationOptions& options) {
  const EnumerationResult r =
      enumerate_records(initial, params, feedback, n_steps, options);
  check_completeness(r);
  return r.fisher[n_steps - 1];
}

double markov_gap(const ModeAmplitudes& initial, const NetworkParams& params,
                  const FeedbackConfig& feedback, int n_steps,
                  const EnumerationOptions& options) {
  if (n_steps < 3) throw ConfigError("markov_gap needs at least 3 steps");
  EnumerationOptions opts = options;
  opts.collect_m3 = true;
  const EnumerationResult r =
      enumerate_records(initial, params, feedback, n_steps, opts);

  // Two-step marginal over (x_{N-1}, x_N).
  double m2[4][4] = {};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) m2[b][c] += r.m3[a][b][c];

  double gap = 0.0;
  for (int b = 0; b < 4; ++b) {
    double row2 = 0.0;
    for (int c = 0; c < 4; ++c) row2 += m2[b][c];
    if (row2 <= 0.0) continue;
    for (int a = 0; a < 4; ++a) {
      double row3 = 0.0;
      for (int c = 0; c < 4; ++c) row3 += r.m3[a][b][c];
      if (row3 <= 0.0) continue;
      for (int c = 0; c < 4; ++c) {
        const double diff =
            std::abs(r.m3[a][b][c] / row3 - m2[b][c] / row2);
        gap = std::max(gap, diff);
      }
    }
  }
  return gap;
}

ScalingFit fit_quadratic_scaling(const std::vector<int>& n_values,
                                 const std::vector<double>& fisher) {
  if (n_values.size() != fisher.size())
    throw std::invalid_argument("mismatched fit inputs");
  std::vector<int> distinct = n_values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3)
    throw std::invalid_argument("need at least 3 distinct record lengths");

  ScalingFit fit;
  double max_f = 0.0;
  for (double f : fisher) max_f = std::max(max_f, std::abs(f));
  if (max_f == 0.0) return fit;  // no information, no bound

  double s4 = 0.0, s3 = 0.0, s2 = 0.0, y2 = 0.0, y1 = 0.0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double n = n_values[i];
    const double f = fisher[i];
    s4 += n * n * n * n;
    s3 += n * n * n;
    s2 += n * n;
    y2 += f * n * n;
    y1 += f * n;
  }
  const double det = s4 * s2 - s3 * s3;
  if (det == 0.0) return fit;
  fit.a = (y2 * s2 - y1 * s3) / det;
  fit.b = (s4 * y1 - s3 * y2) / det;

  double mean = 0.0;
  for (double f : fisher) mean += f;
  mean /= static_cast<double>(fisher.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double n = n_values[i];
    const double model = fit.a * n * n + fit.b * n;
    ss_res += (fisher[i] - model) * (fisher[i] - model);
    ss_tot += (fisher[i] - mean) * (fisher[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot
                               : (ss_res <= 1e-30 ? 1.0 : 0.0);
  fit.has_information = true;
  return fit;
}

double extrapolated_fisher(const ScalingFit& fit, double t, double dt) {
  const double n = t / dt;
  return fit.a * n * n + fit.b * n;
}

FisherResult fisher_scaling(const ModeAmplitudes& initial,
                            const NetworkParams& params,
                            const FeedbackConfig& feedback, int n_max,
                            const EnumerationOptions& options) {
  const EnumerationResult r =
      enumerate_records(initial, params, feedback, n_max, options);
  check_completeness(r);

  FisherResult out;
  out.dt = params.dt;
  out.phi1 = params.phi1;
  out.phi2 = params.phi2;
  out.n_values.resize(n_max);
  for (int d = 1; d <= n_max; ++d) out.n_values[d - 1] = d;
  out.fisher = r.fisher;

  // F(1) = 0 identically (the first interval precedes any feedback), so
  // the scaling fit uses N >= 2.
  std::vector<int> fit_n;
  std::vector<double> fit_f;
  for (int d = 2; d <= n_max; ++d) {
    fit_n.push_back(d);
    fit_f.push_back(r.fisher[d - 1]);
  }
  if (fit_n.size() >= 3) out.fit = fit_quadratic_scaling(fit_n, fit_f);
  return out;
}

}  // namespace cavnet
