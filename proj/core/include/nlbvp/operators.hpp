#pragma once

#include "nlbvp/fields.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/localization.hpp"
#include "nlbvp/quadrature.hpp"

namespace nlbvp {

/// Everything a nonlocal form evaluation needs: exponents, localization,
/// calibrated kernel, nonlinearity, and quadrature rules.
struct FormContext {
  int d = 1;
  double p = 2, beta = 0;
  Domain domain;
  LocalizationRule rule;
  Horizon horizon;
  RadialProfile rho; ///< calibrated
  KernelConstants constants;
  Nonlinearity phi;
  int n_radial = 24, n_angular = 64;
  BallRule ball_gamma;  ///< w = p-beta, indicator kernel (seminorm)
  BallRule ball_rho;    ///< w = p-beta, rho knots (energy, forms)
  BallRule ball_rho_op; ///< w = p-beta-1, rho knots (operator)
  OmegaRule omega;      ///< outer rule over the domain

  FormContext with_delta(double delta) const;
};

/// Builds a context with the default mollified-indicator rho calibrated for
/// (d, p, beta). The outer rule defaults to a boundary-graded composite in
/// 1D and a mesh rule (h = diam/24) in 2D; callers may replace ctx.omega.
FormContext make_context(const Domain& dom, LocalizationRule rule, double delta, double p,
                         double beta, int n_radial = 24, int n_angular = 64);

/// Gagliardo-type seminorm with the heterogeneous indicator kernel,
/// calibrated so linear fields reproduce their gradient norm.
double seminorm(const Field& u, const FormContext& ctx);

/// Nonlocal energy E_{p,delta}(u).
double energy(const Field& u, const FormContext& ctx);

/// First-variation form B_{p,delta}(u,v); linear in v.
double bilinear(const Field& u, const Field& v, const FormContext& ctx);

/// Local limit form int A_p(grad u) . grad v.
double local_bilinear(const Field& u, const Field& v, const FormContext& ctx);

/// Local limit operator -div A_p(grad u) at x (needs gradient and Hessian).
double local_operator(const Field& u, const Point& x, const FormContext& ctx);

struct OperatorSample {
  Point x{0, 0};
  double value = 0;
  double D1 = 0, D2 = 0; ///< eta-asymmetry and Taylor-remainder components
  bool has_split = false;
  double eps = 0; ///< truncation used; 0 when untruncated
};

/// Pointwise L_{p,delta} u(x) via the absolutely convergent integral; needs
/// beta < d and interior x.
OperatorSample apply_pointwise(const Field& u, const Point& x, const FormContext& ctx);

/// Truncated operator L^eps: kernel support restricted to eps <= |t| < 1 and
/// the evaluation gated by q(lambda(x)) > eps.
OperatorSample apply_truncated(const Field& u, const Point& x, double eps, const FormContext& ctx);

/// The D1 (eta-asymmetry) / D2 (Taylor remainder) decomposition; u needs a
/// Hessian. D1 + D2 equals the eps -> 0 limit of the truncated operator.
std::pair<double, double> split_D1_D2(const Field& u, const Point& x, const FormContext& ctx);

} // namespace nlbvp
