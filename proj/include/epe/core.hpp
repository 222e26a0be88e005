#pragma once

/// \file core.hpp
/// Physical constants, time grid and run configuration for the quasi-static
/// electroporoelasticity solver, plus the plain-text `key = value` config
/// format shared by batch files and CLI flags.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "epe/errors.hpp"

namespace epe {

/// The nine material constants of the coupled Maxwell/Biot model in
/// dimensionless units. Defaults are the values used for the manufactured
/// benchmark problem.
struct PhysicalParams {
  double epsilon = 1.0;   // permittivity
  double mu = 1.0;        // permeability
  double sigma = 2.0;     // conductivity
  double L = 1.0;         // electrokinetic coupling
  double lambda_c = 2.0;  // bulk elastic constant
  double G = 1.0;         // shear modulus
  double alpha = 1.0;     // Biot-Willis coefficient
  double c0 = 1.0;        // storage coefficient
  double kappa = 2.0;     // hydraulic conductivity

  bool operator==(const PhysicalParams&) const = default;
};

/// Checks positivity of every constant and the coupling bound L^2 < sigma*kappa.
/// With `allow_decoupled` the single exception L == 0 is accepted; L^2 >= sigma*kappa
/// is never accepted.
inline PhysicalParams validate_params(const PhysicalParams& raw, bool allow_decoupled = false) {
  const std::pair<const char*, double> named[] = {
      {"epsilon", raw.epsilon}, {"mu", raw.mu},       {"sigma", raw.sigma},
      {"lambda_c", raw.lambda_c}, {"G", raw.G},       {"alpha", raw.alpha},
      {"c0", raw.c0},           {"kappa", raw.kappa},
  };
  for (const auto& [name, value] : named) {
    if (!(value > 0.0)) throw NonPositiveParameter(name);
  }
  if (raw.L == 0.0) {
    if (!allow_decoupled) throw H1Violated(raw.L, raw.sigma, raw.kappa);
    return raw;
  }
  if (!(raw.L > 0.0)) throw NonPositiveParameter("L");
  if (!(raw.L * raw.L < raw.sigma * raw.kappa)) throw H1Violated(raw.L, raw.sigma, raw.kappa);
  return raw;
}

/// Uniform time grid t_n = n * tau on [0, T].
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(0.1, 40) {}

  TimeGrid(double T, std::int64_t N) : T_(T), N_(N) {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidGrid("final time T must be positive");
    if (N < 1) throw InvalidGrid("step count N must be >= 1");
    tau_ = T / static_cast<double>(N);
  }

  double final_time() const { return T_; }
  std::int64_t steps() const { return N_; }
  double tau() const { return tau_; }

  double node(std::int64_t n) const {
    if (n >= N_) return T_;
    return static_cast<double>(n) * tau_;
  }

  std::vector<double> nodes() const {
    std::vector<double> t(static_cast<std::size_t>(N_ + 1));
    for (std::int64_t n = 0; n <= N_; ++n) t[static_cast<std::size_t>(n)] = node(n);
    return t;
  }

 private:
  double T_;
  std::int64_t N_;
  double tau_;
};

inline TimeGrid make_time_grid(double T, std::int64_t N) { return TimeGrid(T, N); }

/// Builds the grid from a requested step size; tau must divide T.
inline TimeGrid time_grid_from_step(double T, double tau) {
  if (!(T > 0.0)) throw InvalidGrid("final time T must be positive");
  if (!(tau > 0.0)) throw InvalidGrid("time step tau must be positive");
  const double ratio = T / tau;
  const auto N = static_cast<std::int64_t>(std::llround(ratio));
  if (N < 1 || std::abs(static_cast<double>(N) * tau - T) > 1e-9 * T)
    throw InvalidGrid("tau=" + std::to_string(tau) + " does not divide T=" + std::to_string(T));
  return TimeGrid(T, N);
}

enum class Scheme { Splitting, Monolithic };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::Splitting ? "splitting" : "monolithic";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "splitting") return Scheme::Splitting;
  if (s == "monolithic") return Scheme::Monolithic;
  throw ValidationError("unknown scheme '" + std::string(s) + "' (expected splitting|monolithic)");
}

struct SolverOptions {
  double spd_tol = 1e-10;
  double saddle_tol = 1e-10;
  std::int64_t direct_threshold = 200000;
  int max_iterations = 20000;

  bool operator==(const SolverOptions&) const = default;
};

struct QuadratureDegrees {
  int assembly = 2;
  int load = 4;
  int error = 5;

  bool operator==(const QuadratureDegrees&) const = default;
};

struct RunConfig {
  PhysicalParams params;
  TimeGrid grid;
  int mesh_n = 4;
  Scheme scheme = Scheme::Splitting;
  SolverOptions solver;
  QuadratureDegrees quad;
  bool allow_decoupled = false;
  // Solve the full (E, H) block in the electromagnetic sub-step instead of the
  // condensed system. Only used to cross-check the condensation.
  bool uncondensed_em = false;
  std::string out_dir = "report";
  int vtk_every = 0;
};

inline void validate_run_config(const RunConfig& cfg) {
  validate_params(cfg.params, cfg.allow_decoupled);
  if (cfg.mesh_n < 1) throw InvalidSubdivision("mesh_n must be >= 1");
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!in_unit(cfg.solver.spd_tol)) throw ValidationError("spd_tol must lie in (0, 1)");
  if (!in_unit(cfg.solver.saddle_tol)) throw ValidationError("saddle_tol must lie in (0, 1)");
  if (cfg.solver.direct_threshold < 0) throw ValidationError("direct_threshold must be >= 0");
  if (cfg.quad.error < 4) throw ValidationError("error quadrature degree must be >= 4");
  for (int d : {cfg.quad.assembly, cfg.quad.load, cfg.quad.error})
    if (d < 1 || d > 6) throw UnsupportedDegree(d);
  if (cfg.vtk_every < 0) throw ValidationError("vtk every must be >= 0");
}

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `#` starts a comment.

using ConfigMap = std::map<std::string, std::string, std::less<>>;

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    out[std::move(key)] = std::move(value);
  }
  return out;
}

inline ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace detail {

inline double parse_real(std::string_view key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("value of '" + std::string(key) + "' is not a real number: '" + v + "'");
  }
}

inline std::int64_t parse_int(std::string_view key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("value of '" + std::string(key) + "' is not an integer: '" + v + "'");
  }
}

inline bool parse_bool(std::string_view key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ValidationError("value of '" + std::string(key) + "' is not a boolean: '" + v + "'");
}

}  // namespace detail

/// Unvalidated settings, filled from defaults, a config file and flags in
/// that order; `resolve` validates and produces a RunConfig.
struct ConfigDraft {
  PhysicalParams params;
  double T = 0.1;
  double tau = 0.0025;
  std::optional<std::int64_t> N;
  int mesh_n = 4;
  std::string scheme = "splitting";
  SolverOptions solver;
  QuadratureDegrees quad;
  bool allow_decoupled = false;
  bool uncondensed_em = false;
  std::string out_dir = "report";
  int vtk_every = 0;

  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k = {
        "epsilon", "mu", "sigma", "L", "lambda_c", "G", "alpha", "c0", "kappa",
        "T", "tau", "N", "mesh_n", "scheme", "spd_tol", "saddle_tol", "direct_threshold",
        "max_iterations", "quad_assembly", "quad_load", "quad_error", "allow_decoupled",
        "uncondensed_em", "out", "vtk_every"};
    return k;
  }

  void set(std::string_view key, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_int;
    using detail::parse_real;
    auto& p = params;
    if (key == "epsilon") p.epsilon = parse_real(key, value);
    else if (key == "mu") p.mu = parse_real(key, value);
    else if (key == "sigma") p.sigma = parse_real(key, value);
    else if (key == "L") p.L = parse_real(key, value);
    else if (key == "lambda_c" || key == "lambda") p.lambda_c = parse_real(key, value);
    else if (key == "G") p.G = parse_real(key, value);
    else if (key == "alpha") p.alpha = parse_real(key, value);
    else if (key == "c0") p.c0 = parse_real(key, value);
    else if (key == "kappa") p.kappa = parse_real(key, value);
    else if (key == "T") T = parse_real(key, value);
    else if (key == "tau") { tau = parse_real(key, value); N.reset(); }
    else if (key == "N") N = parse_int(key, value);
    else if (key == "mesh_n" || key == "n") mesh_n = static_cast<int>(parse_int(key, value));
    else if (key == "scheme") scheme = value;
    else if (key == "spd_tol") solver.spd_tol = parse_real(key, value);
    else if (key == "saddle_tol") solver.saddle_tol = parse_real(key, value);
    else if (key == "direct_threshold") solver.direct_threshold = parse_int(key, value);
    else if (key == "max_iterations") solver.max_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "quad_assembly") quad.assembly = static_cast<int>(parse_int(key, value));
    else if (key == "quad_load") quad.load = static_cast<int>(parse_int(key, value));
    else if (key == "quad_error") quad.error = static_cast<int>(parse_int(key, value));
    else if (key == "allow_decoupled") allow_decoupled = parse_bool(key, value);
    else if (key == "uncondensed_em") uncondensed_em = parse_bool(key, value);
    else if (key == "out") out_dir = value;
    else if (key == "vtk_every") vtk_every = static_cast<int>(parse_int(key, value));
    else throw ValidationError("unknown config key '" + std::string(key) + "'");
  }

  // A file that names both tau and N resolves to N.
  void apply(const ConfigMap& map) {
    for (const auto& [k, v] : map)
      if (k != "N") set(k, v);
    if (auto it = map.find("N"); it != map.end()) set(it->first, it->second);
  }

  RunConfig resolve() const {
    RunConfig cfg;
    cfg.params = validate_params(params, allow_decoupled);
    cfg.grid = N ? make_time_grid(T, *N) : time_grid_from_step(T, tau);
    cfg.mesh_n = mesh_n;
    cfg.scheme = parse_scheme(scheme);
    cfg.solver = solver;
    cfg.quad = quad;
    cfg.allow_decoupled = allow_decoupled;
    cfg.uncondensed_em = uncondensed_em;
    cfg.out_dir = out_dir;
    cfg.vtk_every = vtk_every;
    validate_run_config(cfg);
    return cfg;
  }
};

}  // namespace epe
