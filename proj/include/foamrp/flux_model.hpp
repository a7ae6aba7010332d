#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

namespace foamrp {

// Normalized state: water saturation S and surfactant concentration C,
// both in [0,1].
struct State {
  double S = 0.0;
  double C = 0.0;
};

inline bool states_close(const State& a, const State& b, double tol) {
  return std::abs(a.S - b.S) <= tol && std::abs(a.C - b.C) <= tol;
}

// Value and first derivatives of the fractional-flow function at one point.
struct FluxPoint {
  double f = 0.0;
  double df_dS = 0.0;
  double df_dC = 0.0;
};

struct FluxDerivs {
  double df_dS = 0.0;
  double df_dC = 0.0;
  double d2f_dSS = 0.0;
};

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad user-supplied values (parameters, states out of range).
struct validation_error : error {
  using error::error;
};
// Unreadable or malformed configuration input.
struct config_error : error {
  using error::error;
};
// A wave construction produced an inconsistent result; indicates a bug or
// a flux outside the supported class.
struct construction_error : error {
  using error::error;
};
// An iterative method failed to converge.
struct convergence_error : error {
  using error::error;
};

// Contract for the scalar flux S,C -> f(S,C) ("fractional flow") that drives
// every wave construction.  Requirements on the supported class:
//   f(0,C) = 0, f(1,C) = 1, df_dS > 0 on (0,1), df_dC >= 0,
//   and f(.,C) convex then concave with a single inflection (solvers detect
//   violations of the last property and fall back to a discrete envelope).
// adsorption_constant() is the constant A > 0 in the accumulation (S + A)C.
template <typename M>
concept FluxModel = requires(const M& m, double S, double C) {
  { m.fractional_flow(S, C) } -> std::convertible_to<double>;
  { m.df_dS(S, C) } -> std::convertible_to<double>;
  { m.df_dC(S, C) } -> std::convertible_to<double>;
  { m.d2f_dSS(S, C) } -> std::convertible_to<double>;
  { m.flux_derivatives(S, C) } -> std::convertible_to<FluxDerivs>;
  { m.eval(S, C) } -> std::convertible_to<FluxPoint>;
  { m.adsorption_constant() } -> std::convertible_to<double>;
};

}  // namespace foamrp
