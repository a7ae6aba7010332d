#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "foamrp/flux_model.hpp"

namespace foamrp {

// Two-phase water/gas model with foam (CMG-STARS mobility reduction) and
// linear surfactant adsorption.  Physical units: viscosities Pa.s, densities
// kg/m3, fmsurf and Cmax g/L, Kda L/g; the remaining entries dimensionless.
struct FoamParams {
  double krw0 = 0.0;   // water endpoint relative permeability
  double krg0 = 0.0;   // gas endpoint relative permeability
  double nw = 0.0;     // water Corey exponent
  double ng = 0.0;     // gas Corey exponent
  double mu_w = 0.0;   // water viscosity
  double mu_g = 0.0;   // gas viscosity
  double phi = 0.0;    // porosity
  double rho_w = 0.0;  // water density
  double rho_s = 0.0;  // solid (rock) density
  double fmmob = 0.0;  // maximum foam mobility reduction
  double fmdry = 0.0;  // dry-out midpoint water saturation (physical)
  double epdry = 0.0;  // dry-out sharpness
  double Swc = 0.0;    // connate water saturation
  double Sgr = 0.0;    // residual gas saturation
  double fmsurf = 0.0; // surfactant concentration scale in F1
  double epsurf = 0.0; // surfactant exponent in F1
  double Cmax = 0.0;   // injected (maximum) surfactant concentration
  double Kda = 0.0;    // adsorption partition coefficient

  // Benchmark parameter set used throughout the reference computations.
  static FoamParams table1() {
    FoamParams p;
    p.krw0 = 0.302;
    p.krg0 = 0.004;
    p.nw = 2.0;
    p.ng = 2.0;
    p.mu_w = 1.0e-3;
    p.mu_g = 5.0e-5;
    p.phi = 0.21;
    p.rho_w = 1000.0;
    p.rho_s = 2000.0;
    p.fmmob = 293.27;
    p.fmdry = 0.437;
    p.epdry = 359.33;
    p.Swc = 0.43;
    p.Sgr = 0.293;
    p.fmsurf = 2.0;
    p.epsurf = 1.0;
    p.Cmax = 2.0;
    p.Kda = 0.05;
    return p;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0))
        throw validation_error(std::string("FoamParams: ") + name + " must be > 0");
    };
    positive(krw0, "krw0");
    positive(krg0, "krg0");
    positive(nw, "nw");
    positive(ng, "ng");
    positive(mu_w, "mu_w");
    positive(mu_g, "mu_g");
    positive(phi, "phi");
    positive(rho_w, "rho_w");
    positive(rho_s, "rho_s");
    positive(fmdry, "fmdry");
    positive(epdry, "epdry");
    positive(fmsurf, "fmsurf");
    positive(epsurf, "epsurf");
    positive(Cmax, "Cmax");
    if (nw < 1.0 || ng < 1.0)
      throw validation_error("FoamParams: Corey exponents must be >= 1");
    if (fmmob < 0.0) throw validation_error("FoamParams: fmmob must be >= 0");
    if (Kda < 0.0) throw validation_error("FoamParams: Kda must be >= 0");
    if (phi > 1.0) throw validation_error("FoamParams: phi must be <= 1");
    if (Swc < 0.0 || Sgr < 0.0 || Swc + Sgr >= 1.0)
      throw validation_error("FoamParams: need Swc, Sgr >= 0 and Swc + Sgr < 1");
    if (!(adsorption() > 0.0))
      throw validation_error("FoamParams: adsorption constant must be > 0");
  }

  double saturation_span() const { return 1.0 - Swc - Sgr; }

  // Normalized adsorption constant A in the accumulation term (S + A)C.
  double adsorption() const {
    return (Swc + (1.0 - phi) * (rho_s / (rho_w * phi)) * Kda) / saturation_span();
  }
};

class StarsFlux {
 public:
  explicit StarsFlux(const FoamParams& p) : p_(p) {
    p_.validate();
    span_ = p_.saturation_span();
    mu_ratio_ = p_.mu_w / p_.mu_g;
    ads_ = p_.adsorption();
    dy_dS_ = p_.epdry * span_;
  }

  const FoamParams& params() const { return p_; }
  double adsorption_constant() const { return ads_; }

  // Corey relative permeabilities (gas value without foam), normalized S.
  std::pair<double, double> relative_permeability(double S) const {
    return {p_.krw0 * pw(S, p_.nw), p_.krg0 * pw(1.0 - S, p_.ng)};
  }

  // STARS mobility reduction factor FM = 1/(1 + fmmob*F1*F2).
  double mobility_reduction(double S, double C) const {
    return 1.0 / hfactor(S, C);
  }

  double fractional_flow(double S, double C) const {
    if (S <= 0.0) return 0.0;
    if (S >= 1.0) return 1.0;
    double krw = p_.krw0 * pw(S, p_.nw);
    double kf = p_.krg0 * pw(1.0 - S, p_.ng) / hfactor(S, C);
    return krw / (krw + mu_ratio_ * kf);
  }

  FluxPoint eval(double S, double C) const {
    if (S <= 0.0) return {0.0, 0.0, 0.0};
    if (S >= 1.0) return {1.0, 0.0, 0.0};
    double krw = p_.krw0 * pw(S, p_.nw);
    double dkrw = p_.krw0 * p_.nw * pw(S, p_.nw - 1.0);
    double krg = p_.krg0 * pw(1.0 - S, p_.ng);
    double dkrg = -p_.krg0 * p_.ng * pw(1.0 - S, p_.ng - 1.0);

    double F1, dF1;
    surf(C, F1, dF1);
    double y = p_.epdry * (p_.Swc + S * span_ - p_.fmdry);
    double F2 = 0.5 + std::atan(y) * inv_pi;
    double dF2 = dy_dS_ * inv_pi / (1.0 + y * y);
    double H = 1.0 + p_.fmmob * F1 * F2;
    double H_S = p_.fmmob * F1 * dF2;
    double H_C = p_.fmmob * dF1 * F2;

    double kf = krg / H;
    double kf_S = dkrg / H - krg * H_S / (H * H);
    double kf_C = -krg * H_C / (H * H);

    double D = krw + mu_ratio_ * kf;
    double invD = 1.0 / D;
    double f = krw * invD;
    double N = mu_ratio_ * (dkrw * kf - krw * kf_S);
    return {f, N * invD * invD, -krw * mu_ratio_ * kf_C * invD * invD};
  }

  double df_dS(double S, double C) const { return eval(S, C).df_dS; }
  double df_dC(double S, double C) const { return eval(S, C).df_dC; }

  double d2f_dSS(double S, double C) const {
    // second-derivative path clamps away from the endpoints; only interior
    // values feed the inflection scans
    S = std::min(std::max(S, 1e-12), 1.0 - 1e-12);
    double krw = p_.krw0 * pw(S, p_.nw);
    double dkrw = p_.krw0 * p_.nw * pw(S, p_.nw - 1.0);
    double ddkrw = p_.krw0 * p_.nw * (p_.nw - 1.0) * pw(S, p_.nw - 2.0);
    double krg = p_.krg0 * pw(1.0 - S, p_.ng);
    double dkrg = -p_.krg0 * p_.ng * pw(1.0 - S, p_.ng - 1.0);
    double ddkrg = p_.krg0 * p_.ng * (p_.ng - 1.0) * pw(1.0 - S, p_.ng - 2.0);

    double F1, dF1;
    surf(C, F1, dF1);
    double y = p_.epdry * (p_.Swc + S * span_ - p_.fmdry);
    double opy2 = 1.0 + y * y;
    double F2 = 0.5 + std::atan(y) * inv_pi;
    double dF2 = dy_dS_ * inv_pi / opy2;
    double ddF2 = -2.0 * y * dy_dS_ * dy_dS_ * inv_pi / (opy2 * opy2);
    double H = 1.0 + p_.fmmob * F1 * F2;
    double H_S = p_.fmmob * F1 * dF2;
    double H_SS = p_.fmmob * F1 * ddF2;

    double invH = 1.0 / H;
    double kf = krg * invH;
    double kf_S = dkrg * invH - krg * H_S * invH * invH;
    double kf_SS = ddkrg * invH - 2.0 * dkrg * H_S * invH * invH -
                   krg * H_SS * invH * invH +
                   2.0 * krg * H_S * H_S * invH * invH * invH;

    double D = krw + mu_ratio_ * kf;
    double D_S = dkrw + mu_ratio_ * kf_S;
    double D_SS = ddkrw + mu_ratio_ * kf_SS;
    double invD = 1.0 / D;
    double N = dkrw * D - krw * D_S;
    return (ddkrw * D - krw * D_SS) * invD * invD -
           2.0 * N * D_S * invD * invD * invD;
  }

  FluxDerivs flux_derivatives(double S, double C) const {
    FluxPoint e = eval(S, C);
    return {e.df_dS, e.df_dC, d2f_dSS(S, C)};
  }

  // physical water saturation / surfactant concentration -> normalized state
  State normalize_state(double Sw, double Csw) const {
    State u{(Sw - p_.Swc) / span_, Csw / p_.Cmax};
    if (u.S < -1e-12 || u.S > 1.0 + 1e-12 || u.C < -1e-12 || u.C > 1.0 + 1e-12)
      throw validation_error("normalize_state: value outside the physical range");
    u.S = std::min(std::max(u.S, 0.0), 1.0);
    u.C = std::min(std::max(u.C, 0.0), 1.0);
    return u;
  }

  std::pair<double, double> denormalize_state(const State& u) const {
    return {p_.Swc + u.S * span_, u.C * p_.Cmax};
  }

 private:
  static constexpr double inv_pi = std::numbers::inv_pi;

  // pow with fast paths for the common small integer exponents
  static double pw(double x, double e) {
    if (e == 2.0) return x * x;
    if (e == 1.0) return x;
    if (e == 0.0) return 1.0;
    if (e == 3.0) return x * x * x;
    return std::pow(x, e);
  }

  double hfactor(double S, double C) const {
    double F1, dF1;
    surf(C, F1, dF1);
    double y = p_.epdry * (p_.Swc + S * span_ - p_.fmdry);
    return 1.0 + p_.fmmob * F1 * (0.5 + std::atan(y) * inv_pi);
  }

  // F1(C) and dF1/dC; piecewise power law capped at 1 when the physical
  // concentration C*Cmax reaches fmsurf
  void surf(double C, double& F1, double& dF1) const {
    double c = C * p_.Cmax;
    if (c <= 0.0) {  // no surfactant, no foam; keeps transient C<0 iterates finite
      F1 = 0.0;
      dF1 = 0.0;
    } else if (c < p_.fmsurf) {
      double r = c / p_.fmsurf;
      if (p_.epsurf == 1.0) {
        F1 = r;
        dF1 = p_.Cmax / p_.fmsurf;
      } else {
        F1 = std::pow(r, p_.epsurf);
        dF1 = p_.epsurf * std::pow(r, p_.epsurf - 1.0) * (p_.Cmax / p_.fmsurf);
      }
    } else {
      F1 = 1.0;
      dF1 = 0.0;
    }
  }

  FoamParams p_;
  double span_ = 0.0;
  double mu_ratio_ = 0.0;
  double ads_ = 0.0;
  double dy_dS_ = 0.0;
};

static_assert(FluxModel<StarsFlux>);

}  // namespace foamrp
