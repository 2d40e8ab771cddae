#include "cavnet/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cavnet {

namespace {

using nlohmann::json;

json config_json(const RunConfig& c) {
  // The echo keeps the exact serialized text: it parses back with the
  // library's own reader and keeps every value bit-exact.
  json lines = json::array();
  std::istringstream in(serialize_config(c));
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

json fit_json(const ScalingFit& fit) {
  return json{{"a", fit.a},
              {"b", fit.b},
              {"r_squared", fit.r_squared},
              {"has_information", fit.has_information}};
}

json bound_samples_json(const ScalingFit& fit, double dt,
                        const std::vector<double>& times) {
  if (!fit.has_information || dt <= 0.0) return nullptr;
  json samples = json::array();
  for (double t : times) {
    const double f = extrapolated_fisher(fit, t, dt);
    json row{{"time", t}, {"n_steps", t / dt}, {"fisher", f}};
    if (f > 0.0) {
      row["reciprocal"] = 1.0 / f;
    } else {
      row["reciprocal"] = nullptr;
    }
    samples.push_back(row);
  }
  return samples;
}

/// Reciprocal extrapolated Fisher information at time t, or NaN when the
/// fit carries no information.
double bound_value(const FisherResult* bound, double t) {
  if (!bound || !bound->fit.has_information || bound->dt <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  const double f = extrapolated_fisher(bound->fit, t, bound->dt);
  return f > 0.0 ? 1.0 / f : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string config_echo_comment(const RunConfig& c) {
  std::ostringstream out;
  std::istringstream in(serialize_config(c));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      out << "#\n";
    } else {
      out << "# " << line << "\n";
    }
  }
  return out.str();
}

std::string trajectories_csv(const std::vector<TrajectoryRecord>& records,
                             const RunConfig& c) {
  std::ostringstream out;
  out << config_echo_comment(c);
  out << "time,counts_d1,counts_d2,pop_d2\n";
  for (std::size_t r = 0; r < records.size(); ++r) {
    const TrajectoryRecord& rec = records[r];
    out << "# trajectory " << r << " seed " << rec.seed << " aborted "
        << (rec.aborted ? 1 : 0) << " jump_warning "
        << (rec.jump_warning ? 1 : 0) << "\n";
    for (std::size_t i = 0; i < rec.grid.size(); ++i) {
      out << format_double(rec.grid[i]) << "," << rec.counts_d1[i] << ","
          << rec.counts_d2[i] << ",";
      if (i < rec.population_d2.size()) {
        out << format_double(rec.population_d2[i]);
      } else {
        out << "nan";
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string signal_csv(const SignalCurve& curve, const RunConfig& c) {
  std::ostringstream out;
  out << config_echo_comment(c);
  out << "# aborted_trajectories = " << curve.aborted << "\n";
  out << "# jump_warning_trajectories = " << curve.jump_warnings << "\n";
  out << "phi_tilde,value,stderr,time,observable,threshold,n_traj,seed\n";
  for (const SignalSample& s : curve.points) {
    out << format_double(s.phi_tilde) << "," << format_double(s.value) << ","
        << format_double(s.stderr_) << "," << format_double(s.time) << ","
        << observable_name(s.observable) << "," << curve.threshold << ","
        << curve.n_traj << "," << curve.master_seed << "\n";
  }
  return out.str();
}

std::string uncertainty_json(const UncertaintyResult& u, const RunConfig& c,
                             const FisherResult* bound) {
  json points = json::array();
  for (const UncertaintyPoint& p : u.points) {
    json row{{"time", p.time},
             {"observable", observable_name(p.observable)},
             {"mean", p.mean},
             {"variance", p.variance},
             {"gradient", p.gradient},
             {"gradient_stderr", p.gradient_stderr},
             {"zero_gradient", p.zero_gradient}};
    if (p.zero_gradient) {
      row["delta_phi_sq"] = nullptr;  // unbounded, not a number
    } else {
      row["delta_phi_sq"] = p.delta_phi_sq;
    }
    const double b = bound_value(bound, p.time);
    if (std::isnan(b)) {
      row["bound_reciprocal_fisher"] = nullptr;
    } else {
      row["bound_reciprocal_fisher"] = b;
    }
    points.push_back(row);
  }

  json doc{{"command", "uncertainty"},
           {"phi_star", u.phi_star},
           {"delta_phi", u.delta_phi},
           {"n_subensembles", u.n_subensembles},
           {"n_traj_per_sub", u.n_traj_per_sub},
           {"threshold", u.threshold},
           {"master_seed", u.master_seed},
           {"points", points},
           {"config", config_json(c)}};
  if (bound) {
    doc["bound_fit"] = fit_json(bound->fit);
    doc["bound_dt"] = bound->dt;
  } else {
    doc["bound_fit"] = nullptr;
    doc["bound_dt"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string uncertainty_csv(const UncertaintyResult& u, const RunConfig& c,
                            const FisherResult* bound) {
  std::ostringstream out;
  out << config_echo_comment(c);
  out << "time,observable,mean,variance,gradient,gradient_stderr,"
         "delta_phi_sq,zero_gradient,bound_reciprocal_fisher\n";
  for (const UncertaintyPoint& p : u.points) {
    out << format_double(p.time) << "," << observable_name(p.observable)
        << "," << format_double(p.mean) << "," << format_double(p.variance)
        << "," << format_double(p.gradient) << ","
        << format_double(p.gradient_stderr) << ","
        << (p.zero_gradient ? "nan" : format_double(p.delta_phi_sq)) << ","
        << (p.zero_gradient ? 1 : 0) << ","
        << format_double(bound_value(bound, p.time)) << "\n";
  }
  return out.str();
}

std::string fisher_json(const FisherResult& f, const RunConfig& c) {
  json doc{{"command", "fisher"},
           {"dt", f.dt},
           {"phi1", f.phi1},
           {"phi2", f.phi2},
           {"n", f.n_values},
           {"F", f.fisher},
           {"fit", fit_json(f.fit)},
           {"bound", bound_samples_json(f.fit, f.dt, c.fisher.times)},
           {"config", config_json(c)}};
  return doc.dump(2) + "\n";
}

std::string fisher_csv(const FisherResult& f, const RunConfig& c) {
  std::ostringstream out;
  out << config_echo_comment(c);
  out << "n,fisher\n";
  for (std::size_t i = 0; i < f.n_values.size(); ++i)
    out << f.n_values[i] << "," << format_double(f.fisher[i]) << "\n";
  return out.str();
}

FisherResult read_fisher_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open fisher result '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed fisher result '" + path + "': " + e.what());
  }

  FisherResult f;
  try {
    f.dt = doc.at("dt").get<double>();
    f.phi1 = doc.at("phi1").get<double>();
    f.phi2 = doc.at("phi2").get<double>();
    f.n_values = doc.at("n").get<std::vector<int>>();
    f.fisher = doc.at("F").get<std::vector<double>>();
    const json& fit = doc.at("fit");
    f.fit.a = fit.at("a").get<double>();
    f.fit.b = fit.at("b").get<double>();
    f.fit.r_squared = fit.at("r_squared").get<double>();
    f.fit.has_information = fit.at("has_information").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError("fisher result '" + path +
                      "' is missing fields: " + e.what());
  }
  return f;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out.good()) throw IoError("failed writing '" + path + "'");
}

}  // namespace cavnet
