#include "cavnet/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cavnet/errors.hpp"

namespace cavnet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_strict(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(where + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw ConfigError(where + ": cannot parse number '" + s + "'");
  if (!std::isfinite(v))
    throw ConfigError(where + ": number '" + s + "' is not finite");
  return v;
}

std::int64_t parse_int_strict(const std::string& text,
                              const std::string& where) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError(where + ": empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw ConfigError(where + ": cannot parse integer '" + s + "'");
  return v;
}

std::uint64_t parse_uint_strict(const std::string& text,
                                const std::string& where) {
  const std::string s = trim(text);
  if (s.empty() || s[0] == '-')
    throw ConfigError(where + ": expected a non-negative integer");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw ConfigError(where + ": cannot parse integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& where) {
  std::vector<double> out;
  for (const std::string& item : split(text, ','))
    out.push_back(parse_double_strict(item, where));
  return out;
}

Observable parse_observable(const std::string& text,
                            const std::string& where) {
  const std::string s = trim(text);
  if (s == "P_d1") return Observable::P_d1;
  if (s == "P_d2") return Observable::P_d2;
  if (s == "P_d1_minus_P_d2") return Observable::P_d1_minus_P_d2;
  throw ConfigError(where + ": unknown observable '" + s +
                    "' (expected P_d1, P_d2 or P_d1_minus_P_d2)");
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

std::string join_observables(const std::vector<Observable>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += observable_name(v[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ConfigError("empty complex number");

  if (s.back() != 'i') return {parse_double_strict(s, "complex"), 0.0};

  const std::string body = s.substr(0, s.size() - 1);
  if (body.empty()) return {0.0, 1.0};

  // Split at the sign of the imaginary part: the last +/- that is not an
  // exponent sign and not the leading sign of the real part.
  std::size_t pos = std::string::npos;
  for (std::size_t j = body.size(); j-- > 1;) {
    const char c = body[j];
    if ((c == '+' || c == '-') && body[j - 1] != 'e' && body[j - 1] != 'E') {
      pos = j;
      break;
    }
  }

  double re = 0.0;
  std::string imag_text;
  if (pos == std::string::npos) {
    imag_text = body;
  } else {
    re = parse_double_strict(body.substr(0, pos), "complex real part");
    imag_text = body.substr(pos);
  }
  double im;
  if (imag_text == "+") {
    im = 1.0;
  } else if (imag_text == "-") {
    im = -1.0;
  } else {
    im = parse_double_strict(imag_text, "complex imaginary part");
  }
  return {re, im};
}

std::string format_complex(complex v) {
  const std::string re = format_double(v.real());
  std::string im = format_double(v.imag());
  if (im[0] != '-') im = "+" + im;
  return re + im + "i";
}

std::vector<double> ScanConfig::phi_grid() const {
  std::vector<double> grid;
  grid.reserve(phi_points);
  if (phi_points == 1) {
    grid.push_back(phi_start);
    return grid;
  }
  const double step =
      (phi_stop - phi_start) / static_cast<double>(phi_points - 1);
  for (std::int64_t i = 0; i < phi_points; ++i)
    grid.push_back(phi_start + static_cast<double>(i) * step);
  return grid;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  bool seen_master_seed = false;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  std::vector<std::string> seen_keys;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;

    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigError(where + ": malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "network" && section != "feedback" &&
          section != "initial" && section != "run" && section != "scan" &&
          section != "uncertainty" && section != "fisher") {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value', got '" + s + "'");
    if (section.empty())
      throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");

    const std::string qualified = section + "." + key;
    for (const std::string& k : seen_keys) {
      if (k == qualified)
        throw ConfigError(where + ": duplicate key '" + qualified + "'");
    }
    seen_keys.push_back(qualified);

    if (section == "network") {
      if (key == "phi1") c.network.phi1 = parse_double_strict(value, where);
      else if (key == "phi2") c.network.phi2 = parse_double_strict(value, where);
      else if (key == "kappa1") c.network.kappa1 = parse_double_strict(value, where);
      else if (key == "kappa2") c.network.kappa2 = parse_double_strict(value, where);
      else if (key == "dt") c.network.dt = parse_double_strict(value, where);
      else if (key == "eps_jump") c.network.eps_jump = parse_double_strict(value, where);
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else if (section == "feedback") {
      if (key == "on_d1_b1") c.feedback.on_d1_b1 = parse_complex(value);
      else if (key == "on_d1_b2") c.feedback.on_d1_b2 = parse_complex(value);
      else if (key == "on_d2_b1") c.feedback.on_d2_b1 = parse_complex(value);
      else if (key == "on_d2_b2") c.feedback.on_d2_b2 = parse_complex(value);
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else if (section == "initial") {
      if (key == "mode") {
        const std::string m = trim(value);
        if (m == "explicit") c.initial_mode = InitialMode::Explicit;
        else if (m == "feedback_pulse") c.initial_mode = InitialMode::FeedbackPulse;
        else throw ConfigError(where + ": unknown initial mode '" + m + "'");
      } else if (key == "gamma1") c.gamma1 = parse_complex(value);
      else if (key == "gamma2") c.gamma2 = parse_complex(value);
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else if (section == "run") {
      if (key == "horizon") c.horizon = parse_double_strict(value, where);
      else if (key == "n_traj") c.n_traj = parse_int_strict(value, where);
      else if (key == "record_every")
        c.run.record_every = static_cast<int>(parse_int_strict(value, where));
      else if (key == "abort_threshold")
        c.run.abort_threshold = parse_double_strict(value, where);
      else if (key == "master_seed") {
        c.master_seed = parse_uint_strict(value, where);
        seen_master_seed = true;
      } else if (key == "workers")
        c.workers = static_cast<int>(parse_int_strict(value, where));
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else if (section == "scan") {
      if (key == "phi_start") c.scan.phi_start = parse_double_strict(value, where);
      else if (key == "phi_stop") c.scan.phi_stop = parse_double_strict(value, where);
      else if (key == "phi_points") c.scan.phi_points = parse_int_strict(value, where);
      else if (key == "times") c.scan.times = parse_double_list(value, where);
      else if (key == "threshold") c.scan.threshold = parse_int_strict(value, where);
      else if (key == "observables") {
        c.scan.observables.clear();
        for (const std::string& item : split(value, ','))
          c.scan.observables.push_back(parse_observable(item, where));
      } else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else if (section == "uncertainty") {
      if (key == "phi_star") c.uncertainty.phi_star = parse_double_strict(value, where);
      else if (key == "delta_phi") c.uncertainty.delta_phi = parse_double_strict(value, where);
      else if (key == "times") c.uncertainty.times = parse_double_list(value, where);
      else if (key == "n_subensembles")
        c.uncertainty.n_subensembles = parse_int_strict(value, where);
      else if (key == "n_traj_per_sub")
        c.uncertainty.n_traj_per_sub = parse_int_strict(value, where);
      else if (key == "threshold")
        c.uncertainty.threshold = parse_int_strict(value, where);
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    } else {  // fisher
      if (key == "n_max") c.fisher.n_max = static_cast<int>(parse_int_strict(value, where));
      else if (key == "dt") c.fisher.dt = parse_double_strict(value, where);
      else if (key == "times") c.fisher.times = parse_double_list(value, where);
      else if (key == "n_cap") c.fisher.n_cap = static_cast<int>(parse_int_strict(value, where));
      else throw ConfigError(where + ": unknown key '" + qualified + "'");
    }
  }

  if (!seen_master_seed)
    throw ConfigError("run.master_seed is required: every run must be "
                      "explicitly seeded");

  if (!(c.network.kappa1 > 0.0) || !(c.network.kappa2 > 0.0))
    throw ConfigError("network decay rates must be positive");
  if (!(c.network.dt > 0.0)) throw ConfigError("network.dt must be positive");
  if (!(c.network.eps_jump > 0.0))
    throw ConfigError("network.eps_jump must be positive");
  if (!(c.horizon > 0.0)) throw ConfigError("run.horizon must be positive");
  if (c.n_traj < 1) throw ConfigError("run.n_traj must be at least 1");
  if (c.run.record_every < 1)
    throw ConfigError("run.record_every must be at least 1");
  if (!(c.run.abort_threshold > 0.0))
    throw ConfigError("run.abort_threshold must be positive");
  if (c.workers < 0) throw ConfigError("run.workers must be >= 0");
  if (c.scan.phi_points < 1)
    throw ConfigError("scan.phi_points must be at least 1");
  if (c.scan.threshold < 0) throw ConfigError("scan.threshold must be >= 0");
  if (c.scan.times.empty()) throw ConfigError("scan.times must be non-empty");
  for (double t : c.scan.times)
    if (!(t > 0.0)) throw ConfigError("scan.times must be positive");
  if (c.scan.observables.empty())
    throw ConfigError("scan.observables must be non-empty");
  if (!(c.uncertainty.delta_phi > 0.0))
    throw ConfigError("uncertainty.delta_phi must be positive");
  if (c.uncertainty.n_subensembles < 2)
    throw ConfigError("uncertainty.n_subensembles must be at least 2");
  if (c.uncertainty.n_traj_per_sub < 1)
    throw ConfigError("uncertainty.n_traj_per_sub must be at least 1");
  if (c.uncertainty.threshold < 0)
    throw ConfigError("uncertainty.threshold must be >= 0");
  if (c.uncertainty.times.empty())
    throw ConfigError("uncertainty.times must be non-empty");
  for (double t : c.uncertainty.times)
    if (!(t > 0.0)) throw ConfigError("uncertainty.times must be positive");
  if (c.fisher.n_max < 1) throw ConfigError("fisher.n_max must be at least 1");
  if (c.fisher.n_cap < 1) throw ConfigError("fisher.n_cap must be at least 1");
  if (c.fisher.dt < 0.0) throw ConfigError("fisher.dt must be >= 0");
  if (c.fisher.times.empty())
    throw ConfigError("fisher.times must be non-empty");
  for (double t : c.fisher.times)
    if (!(t > 0.0)) throw ConfigError("fisher.times must be positive");

  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[network]\n";
  out << "phi1 = " << format_double(c.network.phi1) << "\n";
  out << "phi2 = " << format_double(c.network.phi2) << "\n";
  out << "kappa1 = " << format_double(c.network.kappa1) << "\n";
  out << "kappa2 = " << format_double(c.network.kappa2) << "\n";
  out << "dt = " << format_double(c.network.dt) << "\n";
  out << "eps_jump = " << format_double(c.network.eps_jump) << "\n";
  out << "\n[feedback]\n";
  out << "on_d1_b1 = " << format_complex(c.feedback.on_d1_b1) << "\n";
  out << "on_d1_b2 = " << format_complex(c.feedback.on_d1_b2) << "\n";
  out << "on_d2_b1 = " << format_complex(c.feedback.on_d2_b1) << "\n";
  out << "on_d2_b2 = " << format_complex(c.feedback.on_d2_b2) << "\n";
  out << "\n[initial]\n";
  out << "mode = "
      << (c.initial_mode == InitialMode::Explicit ? "explicit"
                                                  : "feedback_pulse")
      << "\n";
  out << "gamma1 = " << format_complex(c.gamma1) << "\n";
  out << "gamma2 = " << format_complex(c.gamma2) << "\n";
  out << "\n[run]\n";
  out << "horizon = " << format_double(c.horizon) << "\n";
  out << "n_traj = " << c.n_traj << "\n";
  out << "record_every = " << c.run.record_every << "\n";
  out << "abort_threshold = " << format_double(c.run.abort_threshold) << "\n";
  out << "master_seed = " << c.master_seed << "\n";
  // workers is deliberately not serialized: results are worker-invariant,
  // and output files must be byte-identical across --workers settings.
  out << "\n[scan]\n";
  out << "phi_start = " << format_double(c.scan.phi_start) << "\n";
  out << "phi_stop = " << format_double(c.scan.phi_stop) << "\n";
  out << "phi_points = " << c.scan.phi_points << "\n";
  out << "times = " << join_doubles(c.scan.times) << "\n";
  out << "threshold = " << c.scan.threshold << "\n";
  out << "observables = " << join_observables(c.scan.observables) << "\n";
  out << "\n[uncertainty]\n";
  out << "phi_star = " << format_double(c.uncertainty.phi_star) << "\n";
  out << "delta_phi = " << format_double(c.uncertainty.delta_phi) << "\n";
  out << "times = " << join_doubles(c.uncertainty.times) << "\n";
  out << "n_subensembles = " << c.uncertainty.n_subensembles << "\n";
  out << "n_traj_per_sub = " << c.uncertainty.n_traj_per_sub << "\n";
  out << "threshold = " << c.uncertainty.threshold << "\n";
  out << "\n[fisher]\n";
  out << "n_max = " << c.fisher.n_max << "\n";
  out << "dt = " << format_double(c.fisher.dt) << "\n";
  out << "times = " << join_doubles(c.fisher.times) << "\n";
  out << "n_cap = " << c.fisher.n_cap << "\n";
  return out.str();
}

ModeAmplitudes initial_state(const RunConfig& c) {
  if (c.initial_mode == InitialMode::Explicit)
    return {c.gamma1, c.gamma2, Basis::Cavity};
  // One feedback pulse carrying both beta vectors displaces the vacuum;
  // expressed at the feedback ports this is just the summed beta vector,
  // which stays valid for any phase the run later applies.
  return {c.feedback.on_d1_b1 + c.feedback.on_d2_b1,
          c.feedback.on_d1_b2 + c.feedback.on_d2_b2, Basis::Feedback};
}

}  // namespace cavnet
