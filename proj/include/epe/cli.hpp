#pragma once

/// \file cli.hpp
/// The `epe` command line: mesh-info, run, convergence, convergence-time,
/// bench and self-check. Exit codes: 0 success, 1 invalid input, 2 numerical
/// failure, 3 I/O failure.

#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epe/report.hpp"
#include "epe/selfcheck.hpp"
#include "epe/vtk.hpp"

namespace epe {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitIo = 3 };

namespace cli_detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ValidationError("empty entry in list '" + s + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

inline std::vector<int> int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& v : split_list(s)) {
    const auto n = detail::parse_int(key, v);
    if (n < 1) throw InvalidSubdivision(key + " entries must be >= 1");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

inline std::vector<double> real_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& v : split_list(s)) out.push_back(detail::parse_real(key, v));
  return out;
}

// Value flags mirroring config keys; only flags given on the command line
// override the config file.
struct KeyFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_option("--" + key, values[key], help);
  }
  void add_flag(CLI::App* app, const std::string& key, const std::string& help) {
    options[key] = app->add_flag("--" + key, help);
  }
  bool given(const std::string& key) const {
    const auto it = options.find(key);
    return it != options.end() && it->second->count() > 0;
  }
  void apply(ConfigDraft& draft) const {
    // N after tau, so that a given N wins.
    for (const auto& [key, opt] : options) {
      if (key == "N" || opt->count() == 0) continue;
      draft.set(key, opt->get_expected_min() == 0 ? "true" : values.at(key));
    }
    if (given("N")) draft.set("N", values.at("N"));
  }
};

inline void add_model_flags(CLI::App* app, KeyFlags& f) {
  f.add(app, "epsilon", "electric permittivity (default 1)");
  f.add(app, "mu", "magnetic permeability (default 1)");
  f.add(app, "sigma", "electric conductivity (default 2)");
  f.add(app, "L", "electrokinetic coupling (default 1)");
  f.add(app, "lambda_c", "Lame lambda (default 2)");
  f.add(app, "G", "shear modulus (default 1)");
  f.add(app, "alpha", "Biot-Willis coefficient (default 1)");
  f.add(app, "c0", "storage coefficient (default 1)");
  f.add(app, "kappa", "permeability (default 2)");
  f.add(app, "T", "final time (default 0.1)");
  f.add(app, "spd_tol", "relative residual tolerance, SPD solves (default 1e-10)");
  f.add(app, "saddle_tol", "relative residual tolerance, saddle and coupled solves (default 1e-10)");
  f.add(app, "direct_threshold", "largest system factorized directly (default 200000)");
  f.add(app, "max_iterations", "iteration cap for iterative solves (default 20000)");
  f.add(app, "quad_assembly", "quadrature degree for bilinear forms (default 2)");
  f.add(app, "quad_load", "quadrature degree for source loads (default 4)");
  f.add(app, "quad_error", "quadrature degree for error norms (default 5)");
  f.add_flag(app, "allow_decoupled", "accept L = 0");
  f.add_flag(app, "uncondensed_em", "solve the full (E, H) block instead of the condensed system");
}

inline std::string fmt_row(const ErrorNorms& e) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(6) << "E_L2 " << e.E_L2 << "\nH_L2 " << e.H_L2 << "\nu_L2 " << e.u_L2
    << "\nu_H1 " << e.u_H1 << "\np_L2 " << e.p_L2 << '\n';
  return s.str();
}

inline int parse_vtk_every(const std::string& s) {
  std::string v = s;
  if (v.rfind("every=", 0) == 0) v = v.substr(6);
  const auto k = detail::parse_int("vtk", v);
  if (k < 1) throw ValidationError("vtk every must be >= 1");
  return static_cast<int>(k);
}

}  // namespace cli_detail

/// Runs the command line in-process. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Finite element solver for quasi-static electroporoelasticity (Maxwell + Biot)", "epe"};
  app.require_subcommand(1);
  app.set_help_all_flag();

  std::string config_path;
  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", config_path, "key = value config file"); };

  // mesh-info
  auto* mesh_info = app.add_subcommand("mesh-info", "Print mesh statistics for the unit-cube mesh");
  std::string mi_n = "4";
  bool mi_csv = false;
  mesh_info->add_option("--n", mi_n, "subdivisions per axis, comma list allowed")->capture_default_str();
  mesh_info->add_flag("--csv", mi_csv, "print n,V,E,F,C,h rows");

  // run
  auto* run_cmd = app.add_subcommand("run", "Solve the manufactured problem once and report final-time errors");
  KeyFlags run_flags;
  add_config(run_cmd);
  add_model_flags(run_cmd, run_flags);
  run_flags.add(run_cmd, "tau", "time step (default 0.0025)");
  run_flags.add(run_cmd, "N", "number of time steps (overrides tau)");
  run_flags.add(run_cmd, "n", "subdivisions per axis (default 4)");
  run_flags.add(run_cmd, "scheme", "splitting | monolithic (default splitting)");
  run_flags.add(run_cmd, "out", "output directory (default report)");
  std::string vtk_spec;
  run_cmd->add_option("--vtk", vtk_spec, "write VTK snapshots, every=k");

  // convergence
  auto* conv = app.add_subcommand("convergence", "Spatial convergence study at fixed tau");
  KeyFlags conv_flags;
  add_config(conv);
  add_model_flags(conv, conv_flags);
  conv_flags.add(conv, "tau", "time step (default 0.0025)");
  conv_flags.add(conv, "N", "number of time steps (overrides tau)");
  conv_flags.add(conv, "scheme", "splitting | monolithic (default splitting)");
  conv_flags.add(conv, "out", "output directory (default report)");
  std::string conv_n = "4,8,12";
  bool conv_full = false;
  int conv_workers = 1;
  conv->add_option("--n", conv_n, "comma list of subdivisions")->capture_default_str();
  conv->add_flag("--full", conv_full, "append n = 15, 18");
  conv->add_option("--workers", conv_workers, "rows computed concurrently")->capture_default_str();

  // convergence-time
  auto* ctime = app.add_subcommand("convergence-time", "Temporal convergence study against a fine-step reference");
  KeyFlags ctime_flags;
  add_config(ctime);
  add_model_flags(ctime, ctime_flags);
  ctime_flags.add(ctime, "scheme", "splitting | monolithic (default splitting)");
  ctime_flags.add(ctime, "out", "output directory (default report)");
  std::string ct_n = "8", ct_tau = "0.025,0.0125,0.00625";
  double ct_tau_ref = 0.00078125;
  ctime->add_option("--n", ct_n, "subdivisions per axis")->capture_default_str();
  ctime->add_option("--tau", ct_tau, "comma list of time steps")->capture_default_str();
  ctime->add_option("--tau_ref", ct_tau_ref, "reference time step, <= min(tau)/8")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Time splitting against the monolithic scheme");
  KeyFlags bench_flags;
  add_config(bench);
  add_model_flags(bench, bench_flags);
  bench_flags.add(bench, "tau", "time step (default 0.0025)");
  bench_flags.add(bench, "N", "number of time steps (overrides tau)");
  bench_flags.add(bench, "out", "output directory (default report)");
  std::string bench_n = "4,8,12";
  bool bench_full = false;
  bench->add_option("--n", bench_n, "comma list of subdivisions")->capture_default_str();
  bench->add_flag("--full", bench_full, "append n = 15");

  auto* check = app.add_subcommand("self-check", "Run the fast invariant suite");

  auto draft_from = [&](const KeyFlags& flags) {
    ConfigDraft d;
    if (!config_path.empty()) d.apply(read_config_file(config_path));
    flags.apply(d);
    return d;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (mesh_info->parsed()) {
      if (mi_csv) out << "n,V,E,F,C,h\n";
      for (int n : int_list("n", mi_n)) {
        const auto st = mesh_stats(build_unit_cube_mesh(n));
        if (mi_csv) {
          out << n << ',' << st.V << ',' << st.E << ',' << st.F << ',' << st.C << ',' << std::setprecision(15)
              << st.h << '\n';
        } else {
          out << "n " << n << "\nvertices " << st.V << "\nedges " << st.E << "\nfaces " << st.F << "\ncells " << st.C
              << "\nh " << std::setprecision(15) << st.h << "\neuler " << st.euler_characteristic()
              << "\nboundary vertices " << st.boundary_vertices << "\nboundary edges " << st.boundary_edges
              << "\nboundary faces " << st.boundary_faces << "\nvolume " << st.total_volume << '\n';
        }
      }
      return kExitOk;
    }

    if (run_cmd->parsed()) {
      ConfigDraft d = draft_from(run_flags);
      if (!vtk_spec.empty()) d.vtk_every = parse_vtk_every(vtk_spec);
      const RunConfig cfg = d.resolve();
      const TetMesh mesh = build_unit_cube_mesh(cfg.mesh_n);
      const ExactSolution exact = example61(cfg.params);
      std::vector<Observer> observers;
      if (cfg.vtk_every > 0) observers.push_back(vtk_observer(mesh, std::filesystem::path(cfg.out_dir) / "vtk", cfg.vtk_every));
      const RunResult r = run(cfg, mesh, Sources::from(exact), InitialData::from(exact), observers);
      StudyReport rep;
      StudyRow row;
      row.scheme = cfg.scheme;
      row.n = cfg.mesh_n;
      row.h = 1.0 / cfg.mesh_n;
      row.tau = cfg.grid.tau();
      row.errors = error_norms(mesh, r.final_state, exact, cfg.grid.final_time(), cfg.quad.error);
      row.timings = r.timings;
      row.fingerprint = config_fingerprint(cfg);
      rep.rows.push_back(row);
      out << "scheme " << to_string(cfg.scheme) << "\nn " << cfg.mesh_n << "\ntau " << cfg.grid.tau() << "\nsteps "
          << cfg.grid.steps() << '\n'
          << fmt_row(row.errors);
      if (run_flags.given("out")) {
        std::filesystem::create_directories(cfg.out_dir);
        detail::write_text(std::filesystem::path(cfg.out_dir) / "run.csv", to_csv(rep));
      }
      return kExitOk;
    }

    if (conv->parsed()) {
      const RunConfig cfg = draft_from(conv_flags).resolve();
      auto ns = int_list("n", conv_n);
      if (conv_full) ns.insert(ns.end(), {15, 18});
      const StudyReport rep = spatial_convergence(cfg, ns, conv_workers);
      emit_report(rep, cfg.out_dir, "convergence");
      out << to_markdown(rep);
      return kExitOk;
    }

    if (ctime->parsed()) {
      ConfigDraft d = draft_from(ctime_flags);
      const auto taus = real_list("tau", ct_tau);
      const auto ns = int_list("n", ct_n);
      if (ns.size() != 1) throw ValidationError("convergence-time takes a single --n");
      d.mesh_n = ns.front();
      d.tau = ct_tau_ref;
      d.N.reset();
      const RunConfig cfg = d.resolve();
      const StudyReport rep = temporal_convergence(cfg, ns.front(), taus, ct_tau_ref);
      emit_report(rep, cfg.out_dir, "convergence_time");
      out << to_markdown(rep);
      return kExitOk;
    }

    if (bench->parsed()) {
      const RunConfig cfg = draft_from(bench_flags).resolve();
      auto ns = int_list("n", bench_n);
      if (bench_full) ns.push_back(15);
      const StudyReport rep = benchmark(cfg, ns);
      emit_report(rep, cfg.out_dir, "bench");
      out << to_markdown(rep);
      return kExitOk;
    }

    if (check->parsed()) {
      bool ok = true;
      for (const auto& c : self_check()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
      }
      return ok ? kExitOk : kExitNumerical;
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace epe
