#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "foamrp/flux_model.hpp"
#include "foamrp/roots.hpp"
#include "foamrp/waves.hpp"

namespace foamrp {

// Solution of a scalar Riemann problem on one C slice: S-waves ordered by
// velocity, composites merged.  Empty when the data jump is below zero_tol.
struct WaveGroup {
  double C = 0.0;
  double S_left = 0.0;
  double S_right = 0.0;
  std::vector<Wave> waves;
  bool discrete = false;  // built by the discrete-envelope fallback
};

struct ScalarOptions {
  double zero_tol = 1e-12;
  int hull_points = 1 << 14;  // discrete-envelope fallback resolution
};

namespace detail {

// interior zeros of d2f/dSS on the slice
template <FluxModel M>
std::vector<double> inflection_scan(const M& m, double C) {
  auto curv = [&](double S) { return m.d2f_dSS(S, C); };
  auto brackets = sign_change_scan(curv, 1e-9, 1.0 - 1e-9, scan_points);
  std::vector<double> roots;
  roots.reserve(brackets.size());
  for (auto [lo, hi] : brackets) roots.push_back(bracketed_root(curv, lo, hi));
  return roots;
}

template <FluxModel M>
Wave make_shock(const M& m, double C, double Sl, double Sr) {
  double sigma = (m.fractional_flow(Sr, C) - m.fractional_flow(Sl, C)) / (Sr - Sl);
  return {WaveKind::shock, State{Sl, C}, State{Sr, C}, sigma, sigma, {}};
}

template <FluxModel M>
Wave make_rarefaction(const M& m, double C, double Sl, double Sr) {
  return {WaveKind::rarefaction, State{Sl, C}, State{Sr, C},
          m.df_dS(Sl, C), m.df_dS(Sr, C), {}};
}

inline Wave make_composite(std::vector<Wave> parts) {
  Wave w{WaveKind::composite, parts.front().left, parts.back().right,
         parts.front().v_initial, parts.back().v_final, std::move(parts)};
  return w;
}

// Single-inflection construction.  The envelope between S_l and S_r is the
// flux graph up to a Welge tangent point, then the chord: psi(s) is the
// tangency defect f'(s)(S_r - s) - (f(S_r) - f(s)), whose sign at S_l decides
// between a lone shock and a rarefaction with an attached shock.
template <FluxModel M>
std::vector<Wave> single_inflection_waves(const M& m, double C, double Sl,
                                          double Sr, double Si) {
  bool up = Sl < Sr;
  if (up ? (Sr <= Si) : (Sr >= Si)) return {make_rarefaction(m, C, Sl, Sr)};
  if (up ? (Sl >= Si) : (Sl <= Si)) return {make_shock(m, C, Sl, Sr)};

  double fr = m.fractional_flow(Sr, C);
  auto psi = [&](double s) {
    return m.df_dS(s, C) * (Sr - s) - (fr - m.fractional_flow(s, C));
  };
  double at_left = psi(Sl);
  if (up ? (at_left >= 0.0) : (at_left <= 0.0)) return {make_shock(m, C, Sl, Sr)};
  double at_infl = psi(Si);
  double St;
  if (at_infl == 0.0) {
    St = Si;
  } else if ((at_infl > 0.0) == (at_left > 0.0)) {
    // no tangency between the data and the inflection: outside the single-
    // inflection class, resolved by the caller's discrete fallback
    throw construction_error("single_inflection_waves: tangency bracket lost");
  } else {
    double lo = std::min(Sl, Si), hi = std::max(Sl, Si);
    St = bracketed_root(psi, lo, hi, RootOptions{1e-14, 200});
  }
  if (std::abs(St - Sl) <= 1e-12) return {make_shock(m, C, Sl, Sr)};
  if (std::abs(St - Sr) <= 1e-12) return {make_rarefaction(m, C, Sl, Sr)};
  std::vector<Wave> parts;
  parts.push_back(make_rarefaction(m, C, Sl, St));
  parts.push_back(make_shock(m, C, St, Sr));
  return {make_composite(std::move(parts))};
}

// Discrete-envelope fallback for slices with several inflections: convex
// (ascending) or concave (descending) hull of n+1 flux samples; hull vertices
// separated by more than one grid step become chords (shocks), adjacent runs
// follow the graph (rarefactions).
template <FluxModel M>
std::vector<Wave> hull_waves(const M& m, double C, double Sl, double Sr, int n) {
  bool up = Sl < Sr;
  double a = std::min(Sl, Sr), b = std::max(Sl, Sr);
  double h = (b - a) / n;
  std::vector<double> xs(n + 1), ys(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = (i == n) ? b : a + h * i;
    ys[i] = m.fractional_flow(xs[i], C);
  }
  // hull in ascending S; lower hull for the convex envelope, upper for the
  // concave one
  std::vector<int> v;
  auto slope = [&](int i, int j) { return (ys[j] - ys[i]) / (xs[j] - xs[i]); };
  for (int i = 0; i <= n; ++i) {
    while (v.size() >= 2) {
      double s_prev = slope(v[v.size() - 2], v.back());
      double s_new = slope(v.back(), i);
      bool pop = up ? (s_prev >= s_new) : (s_prev <= s_new);
      if (!pop) break;
      v.pop_back();
    }
    v.push_back(i);
  }
  if (!up) std::reverse(v.begin(), v.end());  // solution order: from S_l

  std::vector<Wave> waves;
  std::size_t i = 0;
  while (i + 1 < v.size()) {
    if (std::abs(v[i + 1] - v[i]) > 1) {
      waves.push_back(make_shock(m, C, xs[v[i]], xs[v[i + 1]]));
      ++i;
    } else {
      std::size_t j = i;
      while (j + 1 < v.size() && std::abs(v[j + 1] - v[j]) == 1) ++j;
      waves.push_back(make_rarefaction(m, C, xs[v[i]], xs[v[j]]));
      i = j;
    }
  }
  // merge runs whose junction velocities touch at the hull resolution
  std::vector<Wave> merged;
  for (Wave& w : waves) {
    double curv = std::abs(m.d2f_dSS(w.left.S, C));
    double attach_tol = std::max(1e-9, 50.0 * h * std::max(1.0, curv));
    if (!merged.empty() && w.v_initial - merged.back().v_final <= attach_tol) {
      Wave& prev = merged.back();
      std::vector<Wave> parts;
      if (prev.kind == WaveKind::composite)
        parts = std::move(prev.parts);
      else
        parts.push_back(prev);
      parts.push_back(w);
      merged.back() = make_composite(std::move(parts));
    } else {
      merged.push_back(std::move(w));
    }
  }
  return merged;
}

}  // namespace detail

template <FluxModel M>
WaveGroup solve_scalar(const M& m, double C, double S_l, double S_r,
                       ScalarOptions opt = {}) {
  WaveGroup g{C, S_l, S_r, {}};
  if (std::abs(S_r - S_l) <= opt.zero_tol) return g;
  auto inflections = detail::inflection_scan(m, C);
  if (inflections.size() <= 1) {
    double Si;
    if (inflections.size() == 1) {
      Si = inflections.front();
    } else {
      // curvature of one sign on the whole slice
      Si = m.d2f_dSS(0.5 * (S_l + S_r), C) > 0.0 ? 1.0 : 0.0;
    }
    try {
      g.waves = detail::single_inflection_waves(m, C, S_l, S_r, Si);
      return g;
    } catch (const construction_error&) {
      // fall through to the discrete envelope
    }
  }
  g.waves = detail::hull_waves(m, C, S_l, S_r, opt.hull_points);
  g.discrete = true;
  return g;
}

// saturation inside one S-wave at similarity coordinate xi in
// [v_initial, v_final]
template <FluxModel M>
double sample_wave(const M& m, const Wave& w, double xi) {
  switch (w.kind) {
    case WaveKind::shock:
    case WaveKind::contact:
      return xi < w.v_initial ? w.left.S : w.right.S;
    case WaveKind::rarefaction: {
      double v = std::min(std::max(xi, w.v_initial), w.v_final);
      double lo = std::min(w.left.S, w.right.S);
      double hi = std::max(w.left.S, w.right.S);
      if (hi - lo <= 1e-14) return w.left.S;
      auto excess = [&](double S) { return m.df_dS(S, w.left.C) - v; };
      return bracketed_root(excess, lo, hi, RootOptions{1e-10, 200});
    }
    case WaveKind::composite: {
      for (const Wave& p : w.parts)
        if (xi <= p.v_final) return sample_wave(m, p, xi);
      return w.right.S;
    }
  }
  return w.right.S;
}

template <FluxModel M>
double sample_group(const M& m, const WaveGroup& g, double xi) {
  if (g.waves.empty()) return g.S_left;
  double S = g.S_left;
  for (const Wave& w : g.waves) {
    if (xi < w.v_initial) return S;
    if (xi <= w.v_final) return sample_wave(m, w, xi);
    S = w.right.S;
  }
  return g.S_right;
}

}  // namespace foamrp
