#pragma once

#include "nlbvp/geometry.hpp"
#include "nlbvp/localization.hpp"

#include <vector>

namespace nlbvp {

/// Even, nonnegative radial profile with compact support strictly inside
/// (-1,1) and a plateau around zero. Piecewise smooth; the knot list drives
/// composite quadrature.
struct RadialProfile {
  enum class Kind { MollifiedIndicator, Bump };
  Kind kind = Kind::MollifiedIndicator;
  double plateau = 0.8; ///< c: profile is maximal on [-c, c]
  double support = 0.9; ///< s: supp inside (-s, s), s < 1
  double scale = 1.0;   ///< multiplicative calibration factor

  double operator()(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;

  /// Radial breakpoints in (0, support]; smooth between consecutive knots.
  std::vector<double> knots() const;
};

/// C^2 plateau-then-quintic-falloff profile (the default rho).
RadialProfile mollified_indicator(double plateau = 0.8, double support = 0.9);

/// C^inf bump exp(-1/(1-(t/s)^2)), unnormalized (the default psi shape).
RadialProfile bump_profile(double support = 0.9);

/// Bump profile scaled so that the d-dimensional mass int_{R^d} psi(|x|) dx = 1.
RadialProfile normalized_mollifier(int d, double support = 0.9);

/// Scale c so that int_{B(0,1)} c*psi(|z|) |z|^{-alpha} dz = 1 (alpha < d).
double alpha_normalization(const RadialProfile& psi, double alpha, int d);

/// p-growth nonlinearity Phi_p(t) = |t|^p / p with its derivatives.
struct Nonlinearity {
  double p = 2;
  double growth_c = 1, growth_C = 1;
  double phi(double t) const;
  double dphi(double t) const;
  double d2phi(double t) const;
};

double sphere_measure(int d); ///< sigma(S^{d-1}); counting measure 2 for d=1

/// The Gamma-expression constant: sqrt(pi) Gamma((d+p)/2) / (Gamma((p+1)/2) Gamma(d/2)).
double cbar(int d, double p);

/// C_{d,beta,p} = cbar(d,p) (d+p-beta) / sigma(S^{d-1}); requires beta < d+p.
double normalization_constant(int d, double beta, double p);

struct KernelConstants {
  int d = 1;
  double p = 2, beta = 0;
  double cbar_dp = 1;   ///< \bar C_{d,p}
  double sigma = 2;     ///< sigma(S^{d-1})
  double C_dbp = 1;     ///< C_{d,beta,p}
  double rho_bar = 1;   ///< \bar rho_{p-beta} after calibration
  double rho_scale = 1; ///< factor applied to rho
};

/// Radial moment int_{B(0,1)} |z|^alpha rho(|z|) dz (alpha > -d).
double rho_moment(const RadialProfile& rho, double alpha, int d);

/// Scales rho so that \bar rho_{p-beta} = \bar C_{d,p}; returns the constants.
KernelConstants calibrate_rho(RadialProfile& rho, int d, double p, double beta);

/// The heterogeneous kernel gamma_{beta,p}[delta;q](x,y). Returns +inf at
/// x = y when beta > 0; quadrature never samples the diagonal.
double gamma_kernel(const Point& x, const Point& y, int d, double beta, double p,
                    const LocalizationRule& rule, const Horizon& horizon);

/// A_p(a) = rho_bar * avg_{S^{d-1}} Phi_p'(a.w) w dsigma(w) by sphere
/// quadrature; equals |a|^{p-2} a for the calibrated default profile.
Point monotone_map(const Point& a, double p, double rho_bar_pb, int d);

/// Boundary-flux function BF^N_{p,delta}(a,theta). For N > 1 this is
/// A_p(a).theta; for N = 1 it carries the log-weighted ball integral and
/// requires delta*qprime0 < 1/3.
double boundary_flux(int N, const Point& a, const Point& theta, double delta, double qprime0,
                     double beta, double p, const RadialProfile& rho, int d);

/// Half-space fluxes BF^{N,+} / BF^{N,-}; sign is +1 or -1. For N > 1 each
/// half equals BF^N / 2.
double boundary_flux_half(int sign, int N, const Point& a, const Point& theta, double delta,
                          double qprime0, double beta, double p, const RadialProfile& rho, int d);

/// A_delta^N: exactly 1 for N > 1 (calibrated); for N = 1 the log-weighted
/// ball quadrature (p = 2).
double a_delta_constant(int N, double delta, double beta, const RadialProfile& rho,
                        double qprime0, int d);

/// Boundary-localizing mollifier psi_{delta,alpha}(x,y); requires alpha < d
/// and eta_delta(x) > 0.
double weighted_mollifier(const RadialProfile& psi, const LocalizationRule& rule,
                          const Horizon& horizon, double alpha, const Point& x, const Point& y);

/// hat(k)(x,y) = k(x,y) + k(y,x) for the weighted mollifier.
double weighted_mollifier_hat(const RadialProfile& psi, const LocalizationRule& rule,
                              const Horizon& horizon, double alpha, const Point& x, const Point& y);

} // namespace nlbvp
