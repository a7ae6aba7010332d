#pragma once

// Independent reference implementations used to cross-check the library:
// finite-difference derivatives, a plain bisection root finder, a dense-grid
// envelope construction for scalar Riemann problems, and synthetic fluxes
// with known analytic structure.  Everything here is deliberately written
// from scratch against the defining formulas, not by calling the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <foamrp/buckley_leverett.hpp>
#include <foamrp/flux_model.hpp>
#include <foamrp/riemann.hpp>

namespace testing_support {

// ---------------------------------------------------------------------------
// finite differences

inline double central_d(const std::function<double(double)>& f, double x,
                        double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double central_d2(const std::function<double(double)>& f, double x,
                         double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// ---------------------------------------------------------------------------
// plain bisection, independent of the library root finder

template <class F>
double bisect(F f, double lo, double hi, int iters = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::runtime_error("bisect: no sign change");
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// synthetic fluxes

// Quadratic fractional-flow model (Corey exponents 2, no foam, no C coupling
// beyond a fixed mobility ratio): f = S^2 / (S^2 + (1-S)^2 / M).
// Single inflection per slice; closed-form tangency points make it a good
// oracle for the scalar construction.
struct QuadraticFlux {
  double M = 1.0;    // mobility ratio multiplying the water term
  double ads = 1.0;  // accumulation shift

  double fractional_flow(double S, double) const {
    double a = M * S * S;
    double b = (1.0 - S) * (1.0 - S);
    return a / (a + b);
  }
  double df_dS(double S, double) const {
    double a = M * S * S;
    double b = (1.0 - S) * (1.0 - S);
    double da = 2.0 * M * S;
    double db = -2.0 * (1.0 - S);
    double denom = (a + b) * (a + b);
    return (da * b - a * db) / denom;
  }
  double df_dC(double, double) const { return 0.0; }
  double d2f_dSS(double S, double C) const {
    // analytic second derivative of a rational function; kept in the
    // finite-difference form for independence from hand algebra
    double h = 1e-5;
    double lo = std::max(S - h, 0.0), hi = std::min(S + h, 1.0);
    double mid = 0.5 * (lo + hi), hh = 0.5 * (hi - lo);
    return (df_dS(mid + hh, C) - df_dS(mid - hh, C)) / (2.0 * hh);
  }
  foamrp::FluxPoint eval(double S, double C) const {
    return {fractional_flow(S, C), df_dS(S, C), df_dC(S, C)};
  }
  foamrp::FluxDerivs flux_derivatives(double S, double C) const {
    return {df_dS(S, C), df_dC(S, C), d2f_dSS(S, C)};
  }
  double adsorption_constant() const { return ads; }
};

// Monotone flux with several inflection points on each slice:
// f = S + a sin(k pi S), f(0)=0, f(1)=1, f' > 0 for a k pi < 1.
// Forces the discrete-hull path of the scalar solver.
struct WavyFlux {
  static constexpr double pi = 3.14159265358979323846;
  double a = 0.09;
  int k = 3;

  double fractional_flow(double S, double) const {
    return S + a * std::sin(k * pi * S);
  }
  double df_dS(double S, double) const {
    return 1.0 + a * k * pi * std::cos(k * pi * S);
  }
  double df_dC(double, double) const { return 0.0; }
  double d2f_dSS(double S, double) const {
    return -a * k * k * pi * pi * std::sin(k * pi * S);
  }
  foamrp::FluxPoint eval(double S, double C) const {
    return {fractional_flow(S, C), df_dS(S, C), df_dC(S, C)};
  }
  foamrp::FluxDerivs flux_derivatives(double S, double C) const {
    return {df_dS(S, C), df_dC(S, C), d2f_dSS(S, C)};
  }
  double adsorption_constant() const { return 1.0; }
};

// ---------------------------------------------------------------------------
// dense-grid envelope oracle for scalar Riemann problems
//
// The scalar solution between S_l and S_r is the lower convex envelope of
// f(., C) for S_l < S_r and the upper concave envelope for S_l > S_r,
// evaluated on a dense saturation grid with the monotone-chain algorithm.
// The oracle reports the elementary pieces of that envelope: maximal runs on
// the graph (rarefactions) and chords bridging them (shocks).

struct OraclePiece {
  bool is_shock = false;
  double S_a = 0.0, S_b = 0.0;  // saturations, ordered from left state side
  double v_a = 0.0, v_b = 0.0;  // velocities (equal for shocks)
};

template <class M>
std::vector<OraclePiece> envelope_oracle(const M& m, double C, double S_l,
                                         double S_r, int n = 20000,
                                         double span_floor = 0.0) {
  if (S_l == S_r) return {};
  bool up = S_l < S_r;
  double lo = std::min(S_l, S_r), hi = std::max(S_l, S_r);
  double dx = (hi - lo) / n;
  double sgn = up ? 1.0 : -1.0;  // concave side flips the ordinate

  // hull of the sampled graph over an arbitrary sorted grid; edges between
  // grid-consecutive points lie on the graph, the rest are chords
  auto build = [&](const std::vector<double>& xs) {
    std::vector<double> fs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      fs[i] = m.fractional_flow(xs[i], C);
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      while (hull.size() >= 2) {
        std::size_t p = hull[hull.size() - 2], q = hull[hull.size() - 1];
        double cross = (xs[q] - xs[p]) * (sgn * fs[i] - sgn * fs[p]) -
                       (xs[i] - xs[p]) * (sgn * fs[q] - sgn * fs[p]);
        if (cross <= 0.0)
          hull.pop_back();
        else
          break;
      }
      hull.push_back(i);
    }
    // walk hull vertices from the left state toward the right state
    if (!up) std::reverse(hull.begin(), hull.end());
    struct Seg {
      bool on_graph;
      std::size_t i, j;
    };
    std::vector<Seg> segs;
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
      std::size_t i = hull[k], j = hull[k + 1];
      bool adj = (i > j ? i - j : j - i) == 1;
      if (adj && !segs.empty() && segs.back().on_graph)
        segs.back().j = j;  // extend the graph run
      else
        segs.push_back({adj, i, j});
    }
    std::vector<OraclePiece> pieces;
    for (const Seg& s : segs) {
      OraclePiece p;
      p.S_a = xs[s.i];
      p.S_b = xs[s.j];
      if (s.on_graph) {
        p.is_shock = false;
        p.v_a = m.df_dS(xs[s.i], C);
        p.v_b = m.df_dS(xs[s.j], C);
      } else {
        p.is_shock = true;
        double sig = (fs[s.j] - fs[s.i]) / (xs[s.j] - xs[s.i]);
        p.v_a = p.v_b = sig;
      }
      pieces.push_back(p);
    }
    return pieces;
  };

  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = lo + (hi - lo) * i / n;
  // lo + (hi - lo) can land one ulp short of hi, and the window pass below
  // keys off s >= hi; an endpoint mistaken for an interior breakpoint gets a
  // point cluster whose spacing is below the fp noise floor of the hull test
  xs[n] = hi;
  std::vector<OraclePiece> coarse = build(xs);

  // second pass: the uniform grid places envelope breakpoints only to within
  // dx, which on steep flux stretches costs |f''| dx in endpoint velocity;
  // re-run the hull with fine windows around every first-pass breakpoint
  for (const OraclePiece& p : coarse) {
    for (double s : {p.S_a, p.S_b}) {
      if (s <= lo || s >= hi) continue;
      double wa = std::max(lo, s - 1.5 * dx), wb = std::min(hi, s + 1.5 * dx);
      for (int i = 0; i <= 600; ++i)
        xs.push_back(wa + (wb - wa) * i / 600);
    }
  }
  std::sort(xs.begin(), xs.end());
  // near-duplicates (a window point recomputing a coarse point 1 ulp off)
  // would break the index-adjacency test, so dedup with a width tolerance
  double fine = dx / 200.0;
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [&](double a, double b) { return b - a < 0.25 * fine; }),
           xs.end());
  std::vector<OraclePiece> pieces = build(xs);

  // drop graph runs too short to be meaningful at the grid resolution
  if (span_floor > 0.0) {
    std::vector<OraclePiece> keep;
    for (const OraclePiece& p : pieces) {
      if (!p.is_shock && std::abs(p.v_b - p.v_a) < span_floor &&
          std::abs(p.S_b - p.S_a) < 8.0 * dx)
        continue;
      keep.push_back(p);
    }
    keep.swap(pieces);
  }

  // roundoff near a tangency can split a chord in two (possibly separated by
  // a just-pruned sliver of graph); fuse equal-velocity neighbours back
  std::vector<OraclePiece> fused;
  for (const OraclePiece& p : pieces) {
    if (!fused.empty() && fused.back().is_shock && p.is_shock &&
        std::abs(fused.back().v_a - p.v_a) <
            1e-3 * std::max(1.0, std::abs(p.v_a))) {
      fused.back().S_b = p.S_b;
      double fa = m.fractional_flow(fused.back().S_a, C);
      double fb = m.fractional_flow(fused.back().S_b, C);
      fused.back().v_a = fused.back().v_b =
          (fb - fa) / (fused.back().S_b - fused.back().S_a);
    } else {
      fused.push_back(p);
    }
  }
  fused.swap(pieces);
  return pieces;
}

// Flatten the library's wave list into the same elementary-piece form.
inline std::vector<OraclePiece> flatten_waves(
    const std::vector<foamrp::Wave>& waves) {
  std::vector<OraclePiece> pieces;
  auto push = [&](const foamrp::Wave& w) {
    OraclePiece p;
    p.is_shock = w.kind == foamrp::WaveKind::shock;
    p.S_a = w.left.S;
    p.S_b = w.right.S;
    p.v_a = w.v_initial;
    p.v_b = w.v_final;
    pieces.push_back(p);
  };
  for (const foamrp::Wave& w : waves) {
    if (w.kind == foamrp::WaveKind::composite)
      for (const foamrp::Wave& p : w.parts) push(p);
    else
      push(w);
  }
  return pieces;
}

// ---------------------------------------------------------------------------
// weak-solution integral check
//
// For a control volume [-X, X] x [0, T] with X beyond the wave fan, the
// integral form of each conservation law reduces to
//   int U(x,T) dx - X (U_L + U_R) + T (F(U_R) - F(U_L)) = 0.
// The profile integral uses midpoint quadrature with the wave discontinuity
// positions placed on cell edges so that no cell straddles a jump.

struct IntegralResidual {
  double res_S = 0.0;  // relative residual, saturation equation
  double res_C = 0.0;  // relative residual, adsorbed-tracer equation
};

template <class M>
IntegralResidual integral_form_residual(const M& m,
                                        const foamrp::RiemannSolution& sol,
                                        double T, int total_cells = 10000) {
  using foamrp::State;
  double ads = m.adsorption_constant();
  double vmin = 0.0, vmax = 0.0;
  for (const foamrp::Wave& w : sol.waves) {
    vmin = std::min(vmin, w.v_initial);
    vmax = std::max(vmax, w.v_final);
  }
  double X = std::max(std::abs(vmin), std::abs(vmax)) * T * 1.25 + 0.5;

  // breakpoints: every discontinuity location plus fan edges
  std::vector<double> cuts{-X, X};
  std::function<void(const foamrp::Wave&)> add = [&](const foamrp::Wave& w) {
    cuts.push_back(w.v_initial * T);
    cuts.push_back(w.v_final * T);
    for (const foamrp::Wave& p : w.parts) add(p);
  };
  for (const foamrp::Wave& w : sol.waves) add(w);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-13; }),
             cuts.end());

  double int_S = 0.0, int_G = 0.0;  // G = (S + A) C
  int used = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double a = std::max(cuts[k], -X), b = std::min(cuts[k + 1], X);
    if (b <= a) continue;
    int nc = std::max(1, static_cast<int>(std::round(total_cells * (b - a) / (2.0 * X))));
    used += nc;
    double dx = (b - a) / nc;
    for (int i = 0; i < nc; ++i) {
      double x = a + (i + 0.5) * dx;
      State u = foamrp::sample_solution(m, sol, x, T);
      int_S += u.S * dx;
      int_G += (u.S + ads) * u.C * dx;
    }
  }
  (void)used;

  const State& L = sol.left;
  const State& R = sol.right;
  double fL = m.fractional_flow(L.S, L.C);
  double fR = m.fractional_flow(R.S, R.C);
  double init_S = X * (L.S + R.S);
  double init_G = X * ((L.S + ads) * L.C + (R.S + ads) * R.C);
  double res_S = int_S - init_S + T * (fR - fL);
  double res_G = int_G - init_G + T * (fR * R.C - fL * L.C);
  double scale_S = std::max({std::abs(init_S), std::abs(int_S), 1.0});
  double scale_G = std::max({std::abs(init_G), std::abs(int_G), 1.0});
  return {std::abs(res_S) / scale_S, std::abs(res_G) / scale_G};
}

// ---------------------------------------------------------------------------
// random states

struct StateSampler {
  std::mt19937_64 rng;
  double margin;

  explicit StateSampler(std::uint64_t seed, double edge_margin = 0.02)
      : rng(seed), margin(edge_margin) {}

  foamrp::State next() {
    std::uniform_real_distribution<double> dS(margin, 1.0 - margin);
    std::uniform_real_distribution<double> dC(0.0, 1.0);
    return {dS(rng), dC(rng)};
  }
};

}  // namespace testing_support
