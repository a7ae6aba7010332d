#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "foamrp/flux_model.hpp"

namespace foamrp {

struct RootOptions {
  double x_tol = 1e-14;  // absolute interval width; domains here are O(1)
  int max_iter = 200;
};

// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs (or one
// endpoint is already a zero).  Secant steps accepted while they stay inside
// the bracket and shrink it; bisection otherwise, so convergence is
// unconditional.
template <typename Fn>
double bracketed_root(Fn&& f, double lo, double hi, RootOptions opt = {}) {
  double fa = f(lo);
  double fb = f(hi);
  if (fa == 0.0) return lo;
  if (fb == 0.0) return hi;
  if (std::isnan(fa) || std::isnan(fb))
    throw construction_error("bracketed_root: NaN at bracket endpoint");
  if ((fa > 0.0) == (fb > 0.0))
    throw construction_error("bracketed_root: endpoints do not bracket a sign change");

  double a = lo, b = hi;
  // previous iterate for the secant model
  double xp = a, fp = fa;
  double xc = b, fc = fb;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (b - a <= opt.x_tol) break;
    double x;
    double denom = fc - fp;
    if (denom != 0.0) {
      x = xc - fc * (xc - xp) / denom;
    } else {
      x = 0.5 * (a + b);
    }
    // reject secant steps that leave the bracket or barely move
    double margin = 0.01 * (b - a);
    if (!(x > a + margin && x < b - margin)) x = 0.5 * (a + b);
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    xp = xc;
    fp = fc;
    xc = x;
    fc = fx;
  }
  return 0.5 * (a + b);
}

// Uniform n-interval scan of [lo, hi]; returns every subinterval across which
// the predicate f > 0 flips (an exact zero counts as non-positive).
template <typename Fn>
std::vector<std::array<double, 2>> sign_change_scan(Fn&& f, double lo, double hi, int n) {
  std::vector<std::array<double, 2>> out;
  double xp = lo;
  bool pp = f(lo) > 0.0;
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / n;
    bool px = f(x) > 0.0;
    if (px != pp) out.push_back({xp, x});
    xp = x;
    pp = px;
  }
  return out;
}

}  // namespace foamrp
