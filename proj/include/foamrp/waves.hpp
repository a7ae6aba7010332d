#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "foamrp/flux_model.hpp"
#include "foamrp/roots.hpp"

namespace foamrp {

// Characteristic families: the S-family speed is df_dS, the C-family speed is
// f/(S+A).  They coincide on the transition curve T; L is the side where the
// S-family is faster, R the side where it is slower.
enum class RegionLabel { L, T, R };

struct Eigenvalues {
  double lambda_S = 0.0;
  double lambda_C = 0.0;
};

template <FluxModel M>
Eigenvalues eigenvalues(const M& m, const State& u) {
  FluxPoint e = m.eval(u.S, u.C);
  return {e.df_dS, e.f / (u.S + m.adsorption_constant())};
}

template <FluxModel M>
double lambda_S(const M& m, const State& u) {
  return m.df_dS(u.S, u.C);
}

template <FluxModel M>
double lambda_C(const M& m, const State& u) {
  return m.fractional_flow(u.S, u.C) / (u.S + m.adsorption_constant());
}

// tol in velocity units
template <FluxModel M>
RegionLabel classify(const M& m, const State& u, double tol = 1e-9) {
  Eigenvalues ev = eigenvalues(m, u);
  double d = ev.lambda_S - ev.lambda_C;
  if (std::abs(d) <= tol) return RegionLabel::T;
  return d > 0.0 ? RegionLabel::L : RegionLabel::R;
}

namespace detail {

constexpr int scan_points = 2048;

// lambda_C - lambda_S on the slice; negative on the L side, positive on R
template <FluxModel M>
double slice_gap(const M& m, double S, double C) {
  FluxPoint e = m.eval(S, C);
  return e.f / (S + m.adsorption_constant()) - e.df_dS;
}

}  // namespace detail

// Transition saturation S*(C): the interior zero of lambda_C - lambda_S.
// Unique for the supported flux class (the slice gap is negative from S=0+
// up to S* and positive through S=1, where it equals 1/(1+A)).
template <FluxModel M>
double transition_point(const M& m, double C) {
  auto gap = [&](double S) { return detail::slice_gap(m, S, C); };
  auto brackets = sign_change_scan(gap, 1e-9, 1.0, detail::scan_points);
  if (brackets.empty())
    throw construction_error("transition_point: no sign change on the slice");
  // rightmost bracket: the transition adjacent to the R region at S=1
  auto [lo, hi] = brackets.back();
  return bracketed_root(gap, lo, hi);
}

// h(C) = lambda_C(S*(C), C), the fastest C-family speed on the slice;
// strictly increasing in C for fluxes with df_dC > 0.
template <FluxModel M>
double transition_speed(const M& m, double C) {
  return lambda_C(m, State{transition_point(m, C), C});
}

// Companion saturation on the opposite side of T with the same lambda_C.
// Returns S* itself on the transition curve and +infinity when the level
// curve of an L-side state exits through S=1 (lambda_C below 1/(1+A)).
template <FluxModel M>
double secondary_intersection(const M& m, const State& u) {
  double ads = m.adsorption_constant();
  double st = transition_point(m, u.C);
  if (std::abs(u.S - st) <= 1e-12) return st;
  double v = lambda_C(m, u);
  auto excess = [&](double S) {
    return m.fractional_flow(S, u.C) / (S + ads) - v;
  };
  if (u.S < st) {
    double edge = 1.0 / (1.0 + ads);  // lambda_C at S=1
    if (v < edge) return std::numeric_limits<double>::infinity();
    return bracketed_root(excess, st, 1.0);
  }
  return bracketed_root(excess, 0.0, st);
}

// Saturations on the slice C where lambda_C equals the level of state v;
// at most one on each side of the transition curve.
struct GammaRoots {
  std::optional<double> left;   // L-side branch
  std::optional<double> right;  // R-side branch
};

namespace detail {

// roots of lambda_C(.,C) = level on both sides of S*(C)
template <FluxModel M>
GammaRoots gamma_slice_roots(const M& m, double level, double C) {
  double ads = m.adsorption_constant();
  double st = transition_point(m, C);
  double h = m.fractional_flow(st, C) / (st + ads);
  GammaRoots out;
  if (level > h + 1e-12) return out;
  if (level >= h - 1e-12) {
    // tangent to the slice maximum
    out.left = st;
    out.right = st;
    return out;
  }
  auto excess = [&](double S) {
    return m.fractional_flow(S, C) / (S + ads) - level;
  };
  if (level >= 0.0) out.left = bracketed_root(excess, 0.0, st);
  double edge = 1.0 / (1.0 + ads);
  if (level >= edge) out.right = bracketed_root(excess, st, 1.0);
  return out;
}

}  // namespace detail

// Level curve of lambda_C through the state v, evaluated on the slice C.
template <FluxModel M>
GammaRoots gamma_curve(const M& m, const State& v, double C) {
  return detail::gamma_slice_roots(m, lambda_C(m, v), C);
}

struct TransitionHit {
  State point{1.0, 0.0};  // sentinel when not found
  bool found = false;
};

// Intersection of the level curve through v (a state in L or on T) with the
// transition curve.  Not found when the level lies below h(0): the level
// curve then exits the phase square through C=0 without meeting T.
template <FluxModel M>
TransitionHit gamma_transition_intersection(const M& m, const State& v,
                                            double tol = 1e-9) {
  if (classify(m, v, tol) == RegionLabel::T) return {v, true};
  double level = lambda_C(m, v);
  if (level < transition_speed(m, 0.0)) return {State{1.0, 0.0}, false};
  auto excess = [&](double C) { return transition_speed(m, C) - level; };
  RootOptions opt;
  opt.x_tol = 1e-13;
  double C = bracketed_root(excess, 0.0, v.C, opt);
  return {State{transition_point(m, C), C}, true};
}

// Contact discontinuities must not cross T: both states on the L side (or on
// T) or both on the R side (or on T), with equal C-family speeds.
template <FluxModel M>
bool contact_admissible(const M& m, const State& l, const State& r,
                        double tol_speed = 1e-8, double tol_region = 1e-9) {
  if (std::abs(lambda_C(m, l) - lambda_C(m, r)) > tol_speed) return false;
  RegionLabel a = classify(m, l, tol_region);
  RegionLabel b = classify(m, r, tol_region);
  return !(a == RegionLabel::L && b == RegionLabel::R) &&
         !(a == RegionLabel::R && b == RegionLabel::L);
}

// Oleinik condition for an S-family discontinuity (C constant), in the
// orientation-uniform chord form: for every u between the endpoints,
//   (f(u) - f(l)) / (u - S_l)  >=  sigma  >=  (f(r) - f(u)) / (S_r - u).
template <FluxModel M>
bool oleinik_admissible(const M& m, const State& l, const State& r,
                        int n_check = 256, double tol = 1e-9) {
  double dS = r.S - l.S;
  if (std::abs(dS) <= 1e-14) return true;
  double fl = m.fractional_flow(l.S, l.C);
  double fr = m.fractional_flow(r.S, l.C);
  double sigma = (fr - fl) / dS;
  double slack = tol * std::max(1.0, std::abs(sigma));
  for (int i = 1; i < n_check; ++i) {
    double u = l.S + dS * static_cast<double>(i) / n_check;
    double fu = m.fractional_flow(u, l.C);
    if ((fu - fl) / (u - l.S) < sigma - slack) return false;
    if ((fr - fu) / (r.S - u) > sigma + slack) return false;
  }
  return true;
}

enum class WaveKind { shock, rarefaction, composite, contact };

inline const char* wave_kind_name(WaveKind k) {
  switch (k) {
    case WaveKind::shock: return "shock";
    case WaveKind::rarefaction: return "rarefaction";
    case WaveKind::composite: return "composite";
    case WaveKind::contact: return "contact";
  }
  return "?";
}

// One wave in a self-similar solution.  left/right are the upstream (slower)
// and downstream (faster) adjacent states; [v_initial, v_final] is the span
// of x/t occupied.  Composites carry their elementary pieces in parts,
// ordered left to right with matching junction velocities.
struct Wave {
  WaveKind kind = WaveKind::shock;
  State left, right;
  double v_initial = 0.0;
  double v_final = 0.0;
  std::vector<Wave> parts;

  // interior junctions (S, velocity) of a composite
  std::vector<std::pair<double, double>> breakpoints() const {
    std::vector<std::pair<double, double>> bp;
    for (std::size_t i = 1; i < parts.size(); ++i)
      bp.emplace_back(parts[i].left.S, parts[i].v_initial);
    return bp;
  }
};

}  // namespace foamrp
