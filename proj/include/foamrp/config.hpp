#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "foamrp/riemann.hpp"
#include "foamrp/simulator.hpp"
#include "foamrp/stars_flux.hpp"

namespace foamrp {

// One named Riemann problem: data states, comparison time, sampling window.
struct ProblemDef {
  std::string params = "table1";
  State left{};
  State right{};
  double t = 0.5;
  double x_min = 0.0;
  double x_max = 1.0;
  int samples = 1001;

  void validate() const {
    auto in_unit = [](const State& u) {
      return u.S >= 0.0 && u.S <= 1.0 && u.C >= 0.0 && u.C <= 1.0;
    };
    if (!in_unit(left) || !in_unit(right))
      throw validation_error("problem states must lie in the unit square");
    if (!(t > 0.0)) throw validation_error("problem time must be positive");
    if (!(x_max > x_min)) throw validation_error("empty sampling window");
    if (samples < 2) throw validation_error("need at least 2 samples");
  }
};

// Full run configuration: named parameter sets, named problems, simulation
// settings, output directory, tolerance overrides.  Sections:
//   [params.NAME]   the flux/adsorption parameter table
//   [problem.NAME]  params, S_L, C_L, S_R, C_R, t, x_min, x_max, samples
//   [sim]           cells, dt, newton_tol, newton_max_iter, overshoot_tol
//   [output]        dir
//   [tolerances]    tol_transition, tol_boundary
struct RunConfig {
  std::map<std::string, FoamParams> params;
  std::map<std::string, ProblemDef> problems;
  SimConfig sim;
  std::string output_dir = ".";
  SolveOptions tolerances;

  static RunConfig defaults() {
    RunConfig c;
    c.params["table1"] = FoamParams::table1();
    ProblemDef drainage;
    drainage.left = State{0.1, 0.05};
    drainage.right = State{0.99, 0.5};
    drainage.t = 0.5;
    c.problems["drainage"] = drainage;
    ProblemDef imbibition;
    imbibition.left = State{0.99, 0.5};
    imbibition.right = State{0.01, 0.0};
    imbibition.t = 0.3;
    c.problems["imbibition"] = imbibition;
    return c;
  }

  const FoamParams& find_params(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end())
      throw config_error("unknown parameter set '" + name + "'");
    return it->second;
  }

  const ProblemDef& find_problem(const std::string& name) const {
    auto it = problems.find(name);
    if (it == problems.end())
      throw config_error("unknown problem '" + name + "'");
    return it->second;
  }

  static RunConfig from_file(const std::string& path);
  static RunConfig from_stream(std::istream& in, const std::string& origin);
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& raw, const std::string& where) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw config_error(where + ": not a number: '" + raw + "'");
  return v;
}

inline int parse_int(const std::string& raw, const std::string& where) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw config_error(where + ": not an integer: '" + raw + "'");
  return static_cast<int>(v);
}

}  // namespace detail

inline RunConfig RunConfig::from_stream(std::istream& in,
                                        const std::string& origin) {
  RunConfig cfg = RunConfig::defaults();
  std::string line, section;
  int lineno = 0;
  // parameter sets declared in the file replace the builtin of the same name
  std::map<std::string, bool> fresh_params, fresh_problems;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = origin + ":" + std::to_string(lineno);
    std::string s = detail::trim(line);
    if (std::size_t hash = s.find_first_of("#;"); hash != std::string::npos)
      s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw config_error(where + ": unterminated section");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw config_error(where + ": empty section name");
      bool known = section == "sim" || section == "output" ||
                   section == "tolerances" ||
                   section.rfind("params.", 0) == 0 ||
                   section.rfind("problem.", 0) == 0;
      if (!known)
        throw config_error(where + ": unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error(where + ": expected key = value");
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    if (key.empty()) throw config_error(where + ": empty key");
    if (section.empty())
      throw config_error(where + ": key outside any section");

    if (section.rfind("params.", 0) == 0) {
      std::string name = section.substr(7);
      if (!fresh_params[name]) {
        cfg.params[name] = FoamParams{};
        fresh_params[name] = true;
      }
      FoamParams& p = cfg.params[name];
      double v = detail::parse_double(value, where);
      if (key == "krw0") p.krw0 = v;
      else if (key == "krg0") p.krg0 = v;
      else if (key == "nw") p.nw = v;
      else if (key == "ng") p.ng = v;
      else if (key == "mu_w") p.mu_w = v;
      else if (key == "mu_g") p.mu_g = v;
      else if (key == "phi") p.phi = v;
      else if (key == "rho_w") p.rho_w = v;
      else if (key == "rho_s") p.rho_s = v;
      else if (key == "fmmob") p.fmmob = v;
      else if (key == "fmdry") p.fmdry = v;
      else if (key == "epdry") p.epdry = v;
      else if (key == "Swc") p.Swc = v;
      else if (key == "Sgr") p.Sgr = v;
      else if (key == "fmsurf") p.fmsurf = v;
      else if (key == "epsurf") p.epsurf = v;
      else if (key == "Cmax") p.Cmax = v;
      else if (key == "Kda") p.Kda = v;
      else throw config_error(where + ": unknown parameter '" + key + "'");
    } else if (section.rfind("problem.", 0) == 0) {
      std::string name = section.substr(8);
      if (!fresh_problems[name]) {
        cfg.problems[name] = ProblemDef{};
        fresh_problems[name] = true;
      }
      ProblemDef& p = cfg.problems[name];
      if (key == "params") p.params = value;
      else if (key == "S_L") p.left.S = detail::parse_double(value, where);
      else if (key == "C_L") p.left.C = detail::parse_double(value, where);
      else if (key == "S_R") p.right.S = detail::parse_double(value, where);
      else if (key == "C_R") p.right.C = detail::parse_double(value, where);
      else if (key == "t") p.t = detail::parse_double(value, where);
      else if (key == "x_min") p.x_min = detail::parse_double(value, where);
      else if (key == "x_max") p.x_max = detail::parse_double(value, where);
      else if (key == "samples") p.samples = detail::parse_int(value, where);
      else throw config_error(where + ": unknown problem key '" + key + "'");
    } else if (section == "sim") {
      if (key == "cells") cfg.sim.n_cells = detail::parse_int(value, where);
      else if (key == "dt") cfg.sim.dt = detail::parse_double(value, where);
      else if (key == "newton_tol")
        cfg.sim.newton_tol = detail::parse_double(value, where);
      else if (key == "newton_max_iter")
        cfg.sim.newton_max_iter = detail::parse_int(value, where);
      else if (key == "overshoot_tol")
        cfg.sim.overshoot_tol = detail::parse_double(value, where);
      else throw config_error(where + ": unknown sim key '" + key + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else throw config_error(where + ": unknown output key '" + key + "'");
    } else {  // tolerances
      if (key == "tol_transition")
        cfg.tolerances.tol_transition = detail::parse_double(value, where);
      else if (key == "tol_boundary")
        cfg.tolerances.tol_boundary = detail::parse_double(value, where);
      else
        throw config_error(where + ": unknown tolerance key '" + key + "'");
    }
  }
  for (auto& [name, p] : cfg.params) {
    try {
      p.validate();
    } catch (const validation_error& e) {
      throw config_error("parameter set '" + name + "': " + e.what());
    }
  }
  for (auto& [name, p] : cfg.problems) {
    try {
      p.validate();
      cfg.find_params(p.params);
    } catch (const error& e) {
      throw config_error("problem '" + name + "': " + e.what());
    }
  }
  return cfg;
}

inline RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return from_stream(in, path);
}

}  // namespace foamrp
