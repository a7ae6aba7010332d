#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <utility>
#include <vector>

#include "foamrp/flux_model.hpp"
#include "foamrp/riemann.hpp"

namespace foamrp {

// Implicit solver for the coupled system on x in [0,1]:
//   dS/dt + df/dx = 0,   d((S+A)C)/dt + d(fC)/dx = 0.
// Crank-Nicolson in time, first-order upwind fluxes in space (all
// characteristic speeds are nonnegative for the supported flux class),
// Dirichlet inflow through a ghost cell pinned to the injected state,
// outflow free (upwinding needs no right boundary condition).
struct SimConfig {
  int n_cells = 2000;
  double dt = 5e-6;
  double t_end = 0.5;
  State left{};     // injected state at x=0
  State initial{};  // uniform initial field
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
  double overshoot_tol = 1e-6;  // clamped silently below this, aborts above

  void validate() const {
    if (n_cells < 10) throw config_error("n_cells must be at least 10");
    if (!(dt > 0.0)) throw config_error("dt must be positive");
    if (!(t_end > 0.0)) throw config_error("t_end must be positive");
    if (!(newton_tol > 0.0)) throw config_error("newton_tol must be positive");
    if (newton_max_iter < 1)
      throw config_error("newton_max_iter must be at least 1");
    auto in_unit = [](const State& u) {
      return u.S >= 0.0 && u.S <= 1.0 && u.C >= 0.0 && u.C <= 1.0;
    };
    if (!in_unit(left) || !in_unit(initial))
      throw validation_error("boundary and initial states must lie in the unit square");
  }
};

struct NumericalSolution {
  std::vector<double> x;                  // cell centers
  std::vector<double> times;              // recorded instants
  std::vector<std::vector<double>> S, C;  // one field per recorded instant
  std::vector<int> newton_iterations;     // per time step
  std::vector<double> residual_norms;     // converged max-norm per step
  long overshoot_clamps = 0;
};

template <FluxModel M>
class CrankNicolsonSolver {
 public:
  struct StepInfo {
    int iterations = 0;
    double residual = 0.0;
  };

  CrankNicolsonSolver(const M& m, SimConfig cfg) : m_(m), cfg_(cfg) {
    cfg_.validate();
    n_ = static_cast<std::size_t>(cfg_.n_cells);
    dx_ = 1.0 / cfg_.n_cells;
    ads_ = m_.adsorption_constant();
    FluxPoint in = m_.eval(cfg_.left.S, cfg_.left.C);
    F_in_ = in.f;
    G_in_ = in.f * cfg_.left.C;
    S_.assign(n_, cfg_.initial.S);
    C_.assign(n_, cfg_.initial.C);
    for (auto* v : {&F_, &G_, &fS_, &fC_, &Fo_, &Go_, &RS_, &RC_, &dS_, &dC_,
                    &St_, &Ct_, &Ft_, &Gt_, &fSt_, &fCt_, &RSt_, &RCt_, &Sn_,
                    &Cn_})
      v->assign(n_, 0.0);
    flux_sweep(S_, C_, F_, G_, fS_, fC_);
  }

  // One implicit step of size dt; on success the stored fields advance.
  StepInfo step(double dt) {
    double k2 = 0.5 * dt / dx_;
    Sn_ = S_;
    Cn_ = C_;
    // the converged fluxes of the previous step are this step's old-time level
    Fo_ = F_;
    Go_ = G_;
    double norm = residual(k2, S_, C_, F_, G_, fS_, fC_, RS_, RC_);
    StepInfo info;
    while (norm > cfg_.newton_tol) {
      if (++info.iterations > cfg_.newton_max_iter) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "Newton did not converge at t=%.9g (residual %.3e); "
                      "reduce dt",
                      t_, norm);
        throw convergence_error(buf);
      }
      newton_direction(k2);
      // damped update: halve the step while the residual grows
      double alpha = 1.0;
      double tnorm = 0.0;
      bool accepted = false;
      for (int attempt = 0; attempt < 8; ++attempt) {
        for (std::size_t i = 0; i < n_; ++i) {
          St_[i] = S_[i] + alpha * dS_[i];
          Ct_[i] = C_[i] + alpha * dC_[i];
        }
        tnorm = residual(k2, St_, Ct_, Ft_, Gt_, fSt_, fCt_, RSt_, RCt_);
        if (tnorm < norm) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      accept_trial();
      norm = tnorm;
      if (!accepted && !(norm == norm))  // NaN guard
        throw convergence_error("Newton produced non-finite residuals");
    }
    clamp_fields();
    t_ += dt;
    info.residual = norm;
    return info;
  }

  // Advance to t_end, recording the fields at each requested instant (sorted,
  // within [0, t_end]); with no requests only the final state is recorded.
  NumericalSolution run(std::vector<double> output_times) {
    NumericalSolution out;
    out.x.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) out.x[i] = (i + 0.5) * dx_;
    std::sort(output_times.begin(), output_times.end());
    output_times.erase(
        std::unique(output_times.begin(), output_times.end()),
        output_times.end());
    if (output_times.empty()) output_times.push_back(cfg_.t_end);
    if (output_times.front() < 0.0 ||
        output_times.back() > cfg_.t_end + 1e-12)
      throw validation_error("output times must lie within [0, t_end]");
    auto record = [&] {
      out.times.push_back(t_);
      out.S.push_back(S_);
      out.C.push_back(C_);
    };
    for (double target : output_times) {
      advance_to(target, out);
      record();
    }
    advance_to(cfg_.t_end, out);
    out.overshoot_clamps = clamps_;
    return out;
  }

  const std::vector<double>& S() const { return S_; }
  const std::vector<double>& C() const { return C_; }
  double dx() const { return dx_; }
  double time() const { return t_; }
  long overshoot_clamps() const { return clamps_; }

 private:
  void advance_to(double target, NumericalSolution& out) {
    while (t_ < target - 1e-14) {
      double dt = std::min(cfg_.dt, target - t_);
      StepInfo info = step(dt);
      out.newton_iterations.push_back(info.iterations);
      out.residual_norms.push_back(info.residual);
    }
  }

  void flux_sweep(const std::vector<double>& S, const std::vector<double>& C,
                  std::vector<double>& F, std::vector<double>& G,
                  std::vector<double>& fS, std::vector<double>& fC) const {
    for (std::size_t i = 0; i < n_; ++i) {
      FluxPoint e = m_.eval(S[i], C[i]);
      F[i] = e.f;
      G[i] = e.f * C[i];
      fS[i] = e.df_dS;
      fC[i] = e.df_dC;
    }
  }

  double residual(double k2, const std::vector<double>& S,
                  const std::vector<double>& C, std::vector<double>& F,
                  std::vector<double>& G, std::vector<double>& fS,
                  std::vector<double>& fC, std::vector<double>& RS,
                  std::vector<double>& RC) const {
    flux_sweep(S, C, F, G, fS, fC);
    double norm = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double Fm = i ? F[i - 1] : F_in_;
      double Gm = i ? G[i - 1] : G_in_;
      double Fmo = i ? Fo_[i - 1] : F_in_;
      double Gmo = i ? Go_[i - 1] : G_in_;
      RS[i] = (S[i] - Sn_[i]) + k2 * ((F[i] - Fm) + (Fo_[i] - Fmo));
      RC[i] = (S[i] + ads_) * C[i] - (Sn_[i] + ads_) * Cn_[i] +
              k2 * ((G[i] - Gm) + (Go_[i] - Gmo));
      norm = std::max(norm, std::max(std::abs(RS[i]), std::abs(RC[i])));
    }
    return norm;
  }

  // Solve J delta = -R by forward substitution: the Jacobian is block lower
  // bidiagonal with 2x2 blocks because each cell couples only to its upwind
  // neighbour.
  void newton_direction(double k2) {
    double pdS = 0.0, pdC = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double rS = RS_[i];
      double rC = RC_[i];
      if (i) {
        rS -= k2 * (fS_[i - 1] * pdS + fC_[i - 1] * pdC);
        rC -= k2 * (fS_[i - 1] * C_[i - 1] * pdS +
                    (fC_[i - 1] * C_[i - 1] + F_[i - 1]) * pdC);
      }
      double a = 1.0 + k2 * fS_[i];
      double b = k2 * fC_[i];
      double c = C_[i] * a;
      double d = (S_[i] + ads_) + k2 * (fC_[i] * C_[i] + F_[i]);
      double det = a * d - b * c;
      if (!(std::abs(det) > 1e-300))
        throw convergence_error("singular Newton block");
      pdS = (-d * rS + b * rC) / det;
      pdC = (c * rS - a * rC) / det;
      dS_[i] = pdS;
      dC_[i] = pdC;
    }
  }

  void accept_trial() {
    S_.swap(St_);
    C_.swap(Ct_);
    F_.swap(Ft_);
    G_.swap(Gt_);
    fS_.swap(fSt_);
    fC_.swap(fCt_);
    RS_.swap(RSt_);
    RC_.swap(RCt_);
  }

  void clamp_fields() {
    bool dirty = false;
    for (std::size_t i = 0; i < n_; ++i) {
      for (double* v : {&S_[i], &C_[i]}) {
        double over = std::max(-*v, *v - 1.0);
        if (over <= 0.0) continue;
        if (over > cfg_.overshoot_tol) {
          char buf[120];
          std::snprintf(buf, sizeof buf,
                        "field overshoot %.3e at cell %zu exceeds tolerance",
                        over, i);
          throw convergence_error(buf);
        }
        *v = std::min(std::max(*v, 0.0), 1.0);
        ++clamps_;
        dirty = true;
      }
    }
    // keep the cached fluxes consistent with the clamped fields
    if (dirty) flux_sweep(S_, C_, F_, G_, fS_, fC_);
  }

  M m_;
  SimConfig cfg_;
  std::size_t n_ = 0;
  double dx_ = 0.0;
  double ads_ = 0.0;
  double F_in_ = 0.0, G_in_ = 0.0;
  double t_ = 0.0;
  long clamps_ = 0;
  std::vector<double> S_, C_, F_, G_, fS_, fC_, Fo_, Go_, RS_, RC_, dS_, dC_;
  std::vector<double> St_, Ct_, Ft_, Gt_, fSt_, fCt_, RSt_, RCt_, Sn_, Cn_;
};

template <FluxModel M>
NumericalSolution run_simulation(const M& m, const SimConfig& cfg,
                                 std::vector<double> output_times = {}) {
  CrankNicolsonSolver<M> solver(m, cfg);
  return solver.run(std::move(output_times));
}

// L1 norms of the field differences against the analytical profile at a
// recorded instant, normalized by the (unit) domain length.
template <FluxModel M>
std::pair<double, double> compare_l1(const M& m, const NumericalSolution& num,
                                     const RiemannSolution& sol, double t) {
  std::size_t k = num.times.size();
  for (std::size_t i = 0; i < num.times.size(); ++i)
    if (std::abs(num.times[i] - t) <= 1e-9) {
      k = i;
      break;
    }
  if (k == num.times.size())
    throw validation_error("requested time was not recorded");
  double errS = 0.0, errC = 0.0;
  for (std::size_t i = 0; i < num.x.size(); ++i) {
    State u = sample_solution(m, sol, num.x[i], t);
    errS += std::abs(num.S[k][i] - u.S);
    errC += std::abs(num.C[k][i] - u.C);
  }
  double dx = 1.0 / static_cast<double>(num.x.size());
  return {errS * dx, errC * dx};
}

}  // namespace foamrp
