#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "foamrp/config.hpp"
#include "foamrp/riemann.hpp"
#include "foamrp/simulator.hpp"
#include "foamrp/stars_flux.hpp"

namespace foamrp::cli {

inline constexpr const char* version = "1.0.0";

// exit codes: 0 ok, 2 usage, 3 config, 4 validation, 5 construction or
// convergence failure, 1 unexpected
enum ExitCode {
  exit_ok = 0,
  exit_unexpected = 1,
  exit_usage = 2,
  exit_config = 3,
  exit_validation = 4,
  exit_failure = 5,
};

namespace detail {

using json = nlohmann::json;

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path,
          std::initializer_list<const char*> header) {
    out_.open(path);
    if (!out_) throw config_error("cannot write '" + path.string() + "'");
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << fmt(v);
      first = false;
    }
    out_ << '\n';
  }

  void row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline json state_json(const State& u) {
  return json{{"S", u.S}, {"C", u.C}};
}

inline json wave_json(const Wave& w) {
  json j{{"kind", wave_kind_name(w.kind)},
         {"left", state_json(w.left)},
         {"right", state_json(w.right)},
         {"v_initial", w.v_initial},
         {"v_final", w.v_final}};
  if (!w.parts.empty()) {
    json parts = json::array();
    for (const Wave& p : w.parts) parts.push_back(wave_json(p));
    j["parts"] = parts;
  }
  return j;
}

inline json classification_json(const Classification& c) {
  return json{{"region", region_name(c.region)},
              {"boundary_L1_L2", c.boundary_L1_L2},
              {"boundary_L1_L3", c.boundary_L1_L3},
              {"boundary_R1_R3", c.boundary_R1_R3}};
}

inline json solution_json(const RiemannSolution& sol) {
  json waves = json::array();
  for (const Wave& w : sol.waves) waves.push_back(wave_json(w));
  json intermediates = json::array();
  for (const State& u : sol.intermediates) intermediates.push_back(state_json(u));
  json j{{"left", state_json(sol.left)},
         {"right", state_json(sol.right)},
         {"classification", classification_json(sol.cls)},
         {"waves", waves},
         {"intermediates", intermediates},
         {"signature", wave_signature(sol.waves)},
         {"used_fallback", sol.used_fallback}};
  if (sol.alternate) j["alternate"] = solution_json(*sol.alternate);
  return j;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

// options shared by every subcommand
struct Common {
  std::string config_path;
  std::string params_name = "table1";
  std::string problem_name = "drainage";
  std::string out_dir;
  double tol_transition = -1.0;
  int cells = -1;
  double dt = -1.0;
  double t_end = -1.0;

  RunConfig load() const {
    RunConfig cfg = config_path.empty() ? RunConfig::defaults()
                                        : RunConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (tol_transition > 0.0) cfg.tolerances.tol_transition = tol_transition;
    if (cells > 0) cfg.sim.n_cells = cells;
    if (dt > 0.0) cfg.sim.dt = dt;
    return cfg;
  }

  std::filesystem::path ensure_out(const RunConfig& cfg) const {
    std::filesystem::path dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    std::filesystem::create_directories(dir);
    return dir;
  }
};

inline void attach_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "configuration file (INI sections)");
  cmd->add_option("--params", c.params_name, "parameter-set name");
  cmd->add_option("--problem", c.problem_name, "problem name");
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--tol-transition", c.tol_transition,
                  "eigenvalue-coincidence tolerance");
  cmd->add_option("--cells", c.cells, "simulation grid cells");
  cmd->add_option("--dt", c.dt, "simulation time step");
  cmd->add_option("--t-end", c.t_end, "simulation end time");
}

inline json provenance(const Common& c, const RunConfig& cfg) {
  return json{{"version", version},
              {"config", c.config_path.empty() ? "builtin" : c.config_path},
              {"params", c.params_name},
              {"tol_transition", cfg.tolerances.tol_transition},
              {"tol_boundary", cfg.tolerances.tol_boundary}};
}

// --- subcommand bodies ---------------------------------------------------

inline int run_flux_table(const Common& c, int ns, int nc) {
  RunConfig cfg = c.load();
  StarsFlux flux(cfg.find_params(c.params_name));
  auto dir = c.ensure_out(cfg);
  CsvFile csv(dir / "flux_table.csv", {"S", "C", "f", "df_dS", "df_dC", "d2f_dSS"});
  for (int i = 0; i < ns; ++i) {
    double S = static_cast<double>(i) / (ns - 1);
    for (int j = 0; j < nc; ++j) {
      double C = static_cast<double>(j) / (nc - 1);
      FluxDerivs d = flux.flux_derivatives(S, C);
      csv.row({S, C, flux.fractional_flow(S, C), d.df_dS, d.df_dC, d.d2f_dSS});
    }
  }
  std::cout << "wrote " << (dir / "flux_table.csv").string() << " (" << ns
            << "x" << nc << " grid)\n";
  return exit_ok;
}

inline int run_phase_plane(const Common& c, int ns, int nc) {
  RunConfig cfg = c.load();
  StarsFlux flux(cfg.find_params(c.params_name));
  auto dir = c.ensure_out(cfg);
  {
    CsvFile csv(dir / "transition_curve.csv", {"C", "S_star", "lambda"});
    for (int j = 0; j < nc; ++j) {
      double C = static_cast<double>(j) / (nc - 1);
      double st = transition_point(flux, C);
      csv.row({C, st, lambda_C(flux, State{st, C})});
    }
  }
  {
    CsvFile csv(dir / "regions.csv",
                {"S", "C", "lambda_S", "lambda_C", "region"});
    for (int i = 0; i < ns; ++i) {
      double S = static_cast<double>(i + 1) / (ns + 1);  // interior grid
      for (int j = 0; j < nc; ++j) {
        double C = static_cast<double>(j) / (nc - 1);
        Eigenvalues ev = eigenvalues(flux, State{S, C});
        RegionLabel lab = classify(flux, State{S, C}, cfg.tolerances.tol_transition);
        const char* name = lab == RegionLabel::L ? "L"
                           : lab == RegionLabel::R ? "R" : "T";
        csv.row_mixed({fmt(S), fmt(C), fmt(ev.lambda_S), fmt(ev.lambda_C), name});
      }
    }
  }
  std::cout << "wrote " << (dir / "transition_curve.csv").string() << " and "
            << (dir / "regions.csv").string() << "\n";
  return exit_ok;
}

inline int run_solve(const Common& c) {
  RunConfig cfg = c.load();
  const ProblemDef& prob = cfg.find_problem(c.problem_name);
  StarsFlux flux(cfg.find_params(prob.params));
  RiemannSolution sol =
      solve_riemann(flux, prob.left, prob.right, cfg.tolerances);
  auto dir = c.ensure_out(cfg);
  double t = c.t_end > 0.0 ? c.t_end : prob.t;

  CsvFile csv(dir / ("solve_" + c.problem_name + ".csv"), {"x", "S", "C"});
  for (int i = 0; i < prob.samples; ++i) {
    double x = prob.x_min +
               (prob.x_max - prob.x_min) * i / (prob.samples - 1);
    State u = sample_solution(flux, sol, x, t);
    csv.row({x, u.S, u.C});
  }

  json j = provenance(c, cfg);
  j["problem"] = c.problem_name;
  j["t"] = t;
  j["solution"] = solution_json(sol);
  write_json(dir / ("solve_" + c.problem_name + ".json"), j);

  std::cout << "region " << region_name(sol.cls.region) << ", waves: "
            << wave_signature(sol.waves) << "\n";
  if (sol.alternate)
    std::cout << "non-uniqueness locus: alternate region "
              << region_name(sol.alternate->cls.region) << ", waves: "
              << wave_signature(sol.alternate->waves) << "\n";
  std::cout << "wrote " << (dir / ("solve_" + c.problem_name + ".csv")).string()
            << "\n";
  return exit_ok;
}

inline int run_simulate(const Common& c) {
  RunConfig cfg = c.load();
  const ProblemDef& prob = cfg.find_problem(c.problem_name);
  StarsFlux flux(cfg.find_params(prob.params));
  SimConfig sim = cfg.sim;
  sim.left = prob.left;
  sim.initial = prob.right;
  sim.t_end = c.t_end > 0.0 ? c.t_end : prob.t;
  NumericalSolution num = run_simulation(flux, sim, {sim.t_end});
  auto dir = c.ensure_out(cfg);

  CsvFile csv(dir / ("sim_" + c.problem_name + ".csv"), {"x", "S", "C"});
  for (std::size_t i = 0; i < num.x.size(); ++i)
    csv.row({num.x[i], num.S.back()[i], num.C.back()[i]});

  long total_iters = 0;
  int max_iters = 0;
  for (int it : num.newton_iterations) {
    total_iters += it;
    max_iters = std::max(max_iters, it);
  }
  json j = provenance(c, cfg);
  j["problem"] = c.problem_name;
  j["cells"] = sim.n_cells;
  j["dt"] = sim.dt;
  j["t_end"] = sim.t_end;
  j["steps"] = num.newton_iterations.size();
  j["newton_total_iterations"] = total_iters;
  j["newton_max_iterations"] = max_iters;
  j["overshoot_clamps"] = num.overshoot_clamps;
  write_json(dir / ("sim_" + c.problem_name + ".json"), j);

  std::cout << "simulated " << c.problem_name << " to t=" << fmt(sim.t_end)
            << " on " << sim.n_cells << " cells ("
            << num.newton_iterations.size() << " steps)\n"
            << "wrote " << (dir / ("sim_" + c.problem_name + ".csv")).string()
            << "\n";
  return exit_ok;
}

inline int run_compare(const Common& c) {
  RunConfig cfg = c.load();
  const ProblemDef& prob = cfg.find_problem(c.problem_name);
  StarsFlux flux(cfg.find_params(prob.params));
  RiemannSolution sol =
      solve_riemann(flux, prob.left, prob.right, cfg.tolerances);
  SimConfig sim = cfg.sim;
  sim.left = prob.left;
  sim.initial = prob.right;
  sim.t_end = c.t_end > 0.0 ? c.t_end : prob.t;
  NumericalSolution num = run_simulation(flux, sim, {sim.t_end});
  auto [errS, errC] = compare_l1(flux, num, sol, num.times.back());
  auto dir = c.ensure_out(cfg);

  CsvFile csv(dir / ("compare_" + c.problem_name + ".csv"),
              {"x", "S_num", "C_num", "S_ref", "C_ref"});
  for (std::size_t i = 0; i < num.x.size(); ++i) {
    State u = sample_solution(flux, sol, num.x[i], num.times.back());
    csv.row({num.x[i], num.S.back()[i], num.C.back()[i], u.S, u.C});
  }

  json j = provenance(c, cfg);
  j["problem"] = c.problem_name;
  j["cells"] = sim.n_cells;
  j["dt"] = sim.dt;
  j["t"] = sim.t_end;
  j["err_S_l1"] = errS;
  j["err_C_l1"] = errC;
  j["region"] = region_name(sol.cls.region);
  j["signature"] = wave_signature(sol.waves);
  write_json(dir / ("compare_" + c.problem_name + ".json"), j);

  std::cout << "L1 errors at t=" << fmt(sim.t_end) << ": S " << fmt(errS)
            << ", C " << fmt(errC) << "\n"
            << "wrote "
            << (dir / ("compare_" + c.problem_name + ".csv")).string() << "\n";
  return exit_ok;
}

inline int run_scan(const Common& c, double sr_min, double sr_max, double cr,
                    int points) {
  RunConfig cfg = c.load();
  const ProblemDef& prob = cfg.find_problem(c.problem_name);
  StarsFlux flux(cfg.find_params(prob.params));
  if (points < 2) throw validation_error("scan needs at least 2 points");
  double c_right = cr >= 0.0 ? cr : prob.right.C;
  std::vector<State> rights;
  rights.reserve(points);
  for (int i = 0; i < points; ++i)
    rights.push_back(State{
        sr_min + (sr_max - sr_min) * i / (points - 1), c_right});
  std::vector<ScanPoint> pts =
      stability_scan(flux, prob.left, rights, cfg.tolerances);
  auto crossings = scan_crossings(pts);
  auto dir = c.ensure_out(cfg);

  CsvFile csv(dir / ("scan_" + c.problem_name + ".csv"),
              {"S_R", "C_R", "region", "n_waves", "signature", "on_boundary"});
  for (const ScanPoint& p : pts)
    csv.row_mixed({fmt(p.right.S), fmt(p.right.C),
                   region_name(p.cls.region), std::to_string(p.n_waves),
                   p.signature,
                   on_nonuniqueness_locus(p.cls) ? "1" : "0"});

  json j = provenance(c, cfg);
  j["problem"] = c.problem_name;
  j["C_R"] = c_right;
  json cross = json::array();
  for (std::size_t idx : crossings) {
    cross.push_back(json{{"S_R_before", pts[idx - 1].right.S},
                         {"S_R_after", pts[idx].right.S},
                         {"signature_before", pts[idx - 1].signature},
                         {"signature_after", pts[idx].signature}});
    std::cout << "crossing between S_R=" << fmt(pts[idx - 1].right.S)
              << " (" << pts[idx - 1].signature << ") and S_R="
              << fmt(pts[idx].right.S) << " (" << pts[idx].signature << ")\n";
  }
  j["crossings"] = cross;
  write_json(dir / ("scan_" + c.problem_name + ".json"), j);
  std::cout << "wrote " << (dir / ("scan_" + c.problem_name + ".csv")).string()
            << "\n";
  return exit_ok;
}

}  // namespace detail

inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"exact and simulated two-phase foam displacement with surfactant transport"};
  app.require_subcommand(1);
  detail::Common common;
  int ns = 101, nc = 11;
  double sr_min = 0.0, sr_max = 1.0, cr = -1.0;
  int scan_points = 101;

  CLI::App* cmd_flux = app.add_subcommand(
      "flux-table", "tabulate the fractional flow and its derivatives");
  detail::attach_common(cmd_flux, common);
  cmd_flux->add_option("--ns", ns, "saturation grid points");
  cmd_flux->add_option("--nc", nc, "concentration grid points");

  CLI::App* cmd_phase = app.add_subcommand(
      "phase-plane", "transition curve and characteristic-speed regions");
  detail::attach_common(cmd_phase, common);
  cmd_phase->add_option("--ns", ns, "saturation grid points");
  cmd_phase->add_option("--nc", nc, "concentration grid points");

  CLI::App* cmd_solve = app.add_subcommand(
      "solve", "exact Riemann solution: classification, waves, profile");
  detail::attach_common(cmd_solve, common);

  CLI::App* cmd_sim = app.add_subcommand(
      "simulate", "implicit finite-difference simulation of the system");
  detail::attach_common(cmd_sim, common);

  CLI::App* cmd_cmp = app.add_subcommand(
      "compare", "L1 comparison of the exact and simulated profiles");
  detail::attach_common(cmd_cmp, common);

  CLI::App* cmd_scan = app.add_subcommand(
      "scan", "survey solution structure along a family of right states");
  detail::attach_common(cmd_scan, common);
  cmd_scan->add_option("--sr-min", sr_min, "first right-state saturation");
  cmd_scan->add_option("--sr-max", sr_max, "last right-state saturation");
  cmd_scan->add_option("--cr", cr, "right-state concentration (default: problem)");
  cmd_scan->add_option("--points", scan_points, "scan resolution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return exit_usage;
  }

  try {
    if (cmd_flux->parsed()) return detail::run_flux_table(common, ns, nc);
    if (cmd_phase->parsed()) return detail::run_phase_plane(common, ns, nc);
    if (cmd_solve->parsed()) return detail::run_solve(common);
    if (cmd_sim->parsed()) return detail::run_simulate(common);
    if (cmd_cmp->parsed()) return detail::run_compare(common);
    if (cmd_scan->parsed())
      return detail::run_scan(common, sr_min, sr_max, cr, scan_points);
    std::cerr << R"({"error":"usage","message":"no subcommand"})" << "\n";
    return exit_usage;
  } catch (const config_error& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"message", e.what()}}
              << "\n";
    return exit_config;
  } catch (const validation_error& e) {
    std::cerr << nlohmann::json{{"error", "validation"}, {"message", e.what()}}
              << "\n";
    return exit_validation;
  } catch (const error& e) {
    std::cerr << nlohmann::json{{"error", "solver"}, {"message", e.what()}}
              << "\n";
    return exit_failure;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}
              << "\n";
    return exit_unexpected;
  }
}

inline int dispatch(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("foamrp");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& s : full) argv.push_back(s.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace foamrp::cli
