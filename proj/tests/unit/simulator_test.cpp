#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <foamrp/simulator.hpp>
#include <foamrp/stars_flux.hpp>

using namespace foamrp;

namespace {

const StarsFlux& model() {
  static StarsFlux m(FoamParams::table1());
  return m;
}

SimConfig small_drainage() {
  SimConfig cfg;
  cfg.n_cells = 200;
  cfg.dt = 1e-4;
  cfg.t_end = 0.05;
  cfg.left = State{0.1, 0.05};
  cfg.initial = State{0.99, 0.5};
  return cfg;
}

}  // namespace

TEST(Simulator, ConstantStateStaysConstant) {
  SimConfig cfg;
  cfg.n_cells = 50;
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  cfg.left = State{0.4, 0.3};
  cfg.initial = State{0.4, 0.3};
  NumericalSolution num = run_simulation(model(), cfg);
  for (double s : num.S.back()) EXPECT_NEAR(s, 0.4, 1e-12);
  for (double c : num.C.back()) EXPECT_NEAR(c, 0.3, 1e-12);
  for (int it : num.newton_iterations) EXPECT_LE(it, 1);
}

TEST(Simulator, ZeroConcentrationStaysExactlyZero) {
  // with no surfactant anywhere the tracer equation must not create any:
  // the concentration field stays identically zero while saturation moves
  SimConfig cfg = small_drainage();
  cfg.left.C = 0.0;
  cfg.initial.C = 0.0;
  NumericalSolution num = run_simulation(model(), cfg);
  for (double c : num.C.back()) EXPECT_EQ(c, 0.0);
  // saturation did evolve
  EXPECT_LT(num.S.back().front(), 0.2);
  EXPECT_GT(num.S.back().back(), 0.98);
}

TEST(Simulator, DiscreteMassBalance) {
  // before any wave reaches the outlet, the change of each conserved field
  // equals inflow minus outflow flux integrated over time
  const StarsFlux& m = model();
  SimConfig cfg = small_drainage();
  NumericalSolution num = run_simulation(m, cfg, {0.0, cfg.t_end});
  ASSERT_EQ(num.times.size(), 2u);
  double ads = m.adsorption_constant();
  double dx = 1.0 / cfg.n_cells;
  auto totals = [&](std::size_t k) {
    double sS = 0.0, sG = 0.0;
    for (std::size_t i = 0; i < num.x.size(); ++i) {
      sS += num.S[k][i] * dx;
      sG += (num.S[k][i] + ads) * num.C[k][i] * dx;
    }
    return std::pair{sS, sG};
  };
  auto [S0, G0] = totals(0);
  auto [S1, G1] = totals(1);
  // outflow stays at the undisturbed initial state for the whole run
  EXPECT_NEAR(num.S[1].back(), cfg.initial.S, 1e-9);
  double f_in = m.fractional_flow(cfg.left.S, cfg.left.C);
  double f_out = m.fractional_flow(cfg.initial.S, cfg.initial.C);
  double T = cfg.t_end;
  EXPECT_NEAR(S1 - S0, T * (f_in - f_out), 1e-6);
  EXPECT_NEAR(G1 - G0, T * (f_in * cfg.left.C - f_out * cfg.initial.C), 1e-6);
}

TEST(Simulator, CoarseRunTracksAnalyticalSolution) {
  const StarsFlux& m = model();
  SimConfig cfg = small_drainage();
  cfg.n_cells = 400;
  cfg.dt = 5e-5;
  cfg.t_end = 0.2;
  NumericalSolution num = run_simulation(m, cfg);
  RiemannSolution sol = solve_riemann(m, cfg.left, cfg.initial);
  auto [errS, errC] = compare_l1(m, num, sol, cfg.t_end);
  EXPECT_LT(errS, 0.05);
  EXPECT_LT(errC, 0.05);
  // inlet cell has relaxed to the injected state
  EXPECT_NEAR(num.S.back().front(), cfg.left.S, 0.02);
  EXPECT_NEAR(num.C.back().front(), cfg.left.C, 0.02);
}

TEST(Simulator, TimeStepSelfConvergence) {
  const StarsFlux& m = model();
  SimConfig cfg = small_drainage();
  cfg.n_cells = 100;
  cfg.t_end = 0.05;
  auto final_S = [&](double dt) {
    SimConfig c = cfg;
    c.dt = dt;
    return run_simulation(m, c).S.back();
  };
  std::vector<double> a = final_S(4e-4);
  std::vector<double> b = final_S(2e-4);
  std::vector<double> c = final_S(1e-4);
  auto dist = [](const std::vector<double>& u, const std::vector<double>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d += std::abs(u[i] - v[i]);
    return d / u.size();
  };
  double d_ab = dist(a, b);
  double d_bc = dist(b, c);
  EXPECT_LT(d_bc, d_ab);  // halving dt moves the solution less
}

TEST(Simulator, NewtonStaysCheapAndConverged) {
  SimConfig cfg = small_drainage();
  NumericalSolution num = run_simulation(model(), cfg);
  ASSERT_FALSE(num.newton_iterations.empty());
  double mean = 0.0;
  for (int it : num.newton_iterations) {
    EXPECT_LE(it, 10);
    mean += it;
  }
  mean /= num.newton_iterations.size();
  EXPECT_LT(mean, 5.0);
  for (double r : num.residual_norms) EXPECT_LE(r, cfg.newton_tol);
}

TEST(Simulator, ConfigValidation) {
  SimConfig cfg = small_drainage();
  cfg.n_cells = 5;
  EXPECT_THROW(cfg.validate(), config_error);
  cfg = small_drainage();
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), config_error);
  cfg = small_drainage();
  cfg.t_end = -1.0;
  EXPECT_THROW(cfg.validate(), config_error);
  cfg = small_drainage();
  cfg.initial.S = 1.5;
  EXPECT_THROW(cfg.validate(), validation_error);
  cfg = small_drainage();
  cfg.left.C = -0.1;
  EXPECT_THROW(cfg.validate(), validation_error);
}

TEST(Simulator, OutputTimesOutsideRangeRejected) {
  SimConfig cfg = small_drainage();
  cfg.t_end = 0.01;
  EXPECT_THROW(run_simulation(model(), cfg, {0.02}), validation_error);
  EXPECT_THROW(run_simulation(model(), cfg, {-0.5}), validation_error);
}

TEST(CompareL1, UnrecordedTimeThrows) {
  const StarsFlux& m = model();
  SimConfig cfg = small_drainage();
  cfg.t_end = 0.01;
  NumericalSolution num = run_simulation(m, cfg);
  RiemannSolution sol = solve_riemann(m, cfg.left, cfg.initial);
  EXPECT_NO_THROW(compare_l1(m, num, sol, 0.01));
  EXPECT_THROW(compare_l1(m, num, sol, 0.5), validation_error);
}
