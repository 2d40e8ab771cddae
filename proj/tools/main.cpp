#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavnet/config.hpp"
#include "cavnet/errors.hpp"
#include "cavnet/estimator.hpp"
#include "cavnet/fisher.hpp"
#include "cavnet/io.hpp"
#include "cavnet/trajectory.hpp"

namespace {

using namespace cavnet;

/// Primary document goes to --out (or stdout); commands with a CSV
/// companion write it next to the primary file, swapping the extension.
std::string sibling_csv_path(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of("/\\");
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path + ".csv";
  }
  return path.substr(0, dot) + ".csv";
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_text_file(out_path, content);
  }
}

void warn_on_soundness(std::int64_t aborted, std::int64_t jump_warnings) {
  if (jump_warnings > 0) {
    std::cerr << "warning: " << jump_warnings
              << " trajectories had intervals with click probability above "
                 "eps_jump; the one-photon-per-interval picture is strained\n";
  }
  if (aborted > 0) {
    std::cerr << "warning: " << aborted
              << " trajectories hit the amplitude overflow guard and were "
                 "frozen\n";
  }
}

int run_trajectories(const RunConfig& cfg, const std::string& out_path) {
  RunOptions opts = cfg.run;
  opts.keep_population = true;
  const auto records =
      simulate_records(initial_state(cfg), cfg.network, cfg.feedback,
                       cfg.horizon, cfg.n_traj, cfg.master_seed, cfg.workers,
                       opts);
  std::int64_t aborted = 0;
  std::int64_t warned = 0;
  for (const auto& r : records) {
    aborted += r.aborted ? 1 : 0;
    warned += r.jump_warning ? 1 : 0;
  }
  warn_on_soundness(aborted, warned);
  emit(out_path, trajectories_csv(records, cfg));
  return 0;
}

int run_signal(const RunConfig& cfg, const std::string& out_path) {
  const SignalCurve curve = signal_scan(
      initial_state(cfg), cfg.network, cfg.feedback, cfg.scan.phi_grid(),
      cfg.scan.times, cfg.scan.observables, cfg.scan.threshold, cfg.n_traj,
      cfg.master_seed, cfg.workers, cfg.run);
  warn_on_soundness(curve.aborted, curve.jump_warnings);
  emit(out_path, signal_csv(curve, cfg));
  return 0;
}

int run_uncertainty(const RunConfig& cfg, const std::string& out_path,
                    const std::string& fisher_path) {
  FisherResult bound;
  bool have_bound = false;
  if (!fisher_path.empty()) {
    bound = read_fisher_json(fisher_path);
    have_bound = true;
  }
  const UncertaintyResult u = phase_uncertainty(
      initial_state(cfg), cfg.network, cfg.feedback, cfg.uncertainty.phi_star,
      cfg.uncertainty.delta_phi, cfg.uncertainty.times,
      cfg.uncertainty.n_subensembles, cfg.uncertainty.n_traj_per_sub,
      cfg.uncertainty.threshold, cfg.master_seed, cfg.workers, cfg.run);
  for (const auto& p : u.points) {
    if (p.zero_gradient) {
      std::cerr << "note: gradient indistinguishable from zero for "
                << observable_name(p.observable) << " at t="
                << format_double(p.time)
                << "; the phase uncertainty there is unbounded\n";
    }
  }
  const FisherResult* bp = have_bound ? &bound : nullptr;
  emit(out_path, uncertainty_json(u, cfg, bp));
  if (!out_path.empty())
    write_text_file(sibling_csv_path(out_path), uncertainty_csv(u, cfg, bp));
  return 0;
}

int run_fisher(const RunConfig& cfg, const std::string& out_path) {
  NetworkParams params = cfg.network;
  if (cfg.fisher.dt > 0.0) params.dt = cfg.fisher.dt;
  EnumerationOptions opts;
  opts.workers = cfg.workers;
  opts.n_cap = cfg.fisher.n_cap;
  const FisherResult f = fisher_scaling(initial_state(cfg), params,
                                        cfg.feedback, cfg.fisher.n_max, opts);
  emit(out_path, fisher_json(f, cfg));
  if (!out_path.empty())
    write_text_file(sibling_csv_path(out_path), fisher_csv(f, cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-cavity feedback network: trajectories, signals, phase "
               "uncertainty and record Fisher information"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::string fisher_path;
  int workers = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;

  app.add_option("--config", config_path, "run configuration file")
      ->required();
  app.add_option("--out", out_path,
                 "output path (stdout when omitted; commands with a CSV "
                 "companion write it next to this file)");
  app.add_option("--workers", workers,
                 "worker threads (overrides the config; 0 = all cores)");
  auto* seed_opt = app.add_option(
      "--seed", seed, "master seed (overrides the config)");
  app.add_option("--fisher", fisher_path,
                 "fisher JSON whose extrapolated bound is embedded "
                 "(uncertainty only)");

  auto* cmd_traj = app.add_subcommand(
      "trajectories", "sample individual trajectories, dump count and "
                      "population series");
  auto* cmd_signal = app.add_subcommand(
      "signal", "threshold-probability curves over a phase grid");
  auto* cmd_unc = app.add_subcommand(
      "uncertainty", "phase uncertainty by error propagation at phi_star");
  auto* cmd_fisher = app.add_subcommand(
      "fisher", "exact Fisher information of detection records vs length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }
  seed_given = seed_opt->count() > 0;

  try {
    RunConfig cfg = parse_config_file(config_path);
    if (seed_given) cfg.master_seed = seed;
    if (workers >= 0) cfg.workers = workers;

    if (cmd_traj->parsed()) return run_trajectories(cfg, out_path);
    if (cmd_signal->parsed()) return run_signal(cfg, out_path);
    if (cmd_unc->parsed()) return run_uncertainty(cfg, out_path, fisher_path);
    if (cmd_fisher->parsed()) return run_fisher(cfg, out_path);
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GridError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
