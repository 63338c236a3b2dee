#pragma once

#include "nlbvp/fields.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/localization.hpp"
#include "nlbvp/quadrature.hpp"

namespace nlbvp {

/// Bundles the mollifier, localization pair, and the interaction-ball rule
/// used by the boundary-localized convolutions.
struct ConvolutionContext {
  RadialProfile psi;
  LocalizationRule rule;
  Horizon horizon;
  BallRule ball; ///< w_exp = 0, knots of psi

  int dim() const { return rule.lambda.dim; }
};

ConvolutionContext make_convolution(RadialProfile psi, LocalizationRule rule, double delta,
                                    int n_radial = 24, int n_angular = 64);

/// K_delta u(x); on the boundary returns u(x) (continuity extension).
double k_delta(const Field& u, const Point& x, const ConvolutionContext& ctx);

/// Adjoint K*_delta u(x); vanishes on the boundary (the dual interaction set
/// is empty there).
double k_delta_star(const Field& u, const Point& x, const ConvolutionContext& ctx);

/// Matrix-weighted convolution with grad K_delta u = K~_delta[grad u].
Point k_tilde(const VectorField& v, const Point& x, const ConvolutionContext& ctx);

/// Adjoint of k_tilde: <K~ u, v> = <u, K~* v>.
Point k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx);

/// grad K*_delta u by analytic differentiation of the kernel.
Point grad_k_delta_star(const Field& u, const Point& x, const ConvolutionContext& ctx);

/// div K~*_delta v by analytic differentiation of the kernel.
double div_k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx);

/// grad div K~*_delta v (needs psi in C^2).
Point grad_div_k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx);

/// The normalized operator-kernel average J_{delta,alpha} u(x) and the mass
/// P_{delta,alpha}(x); kernel is the alpha-weighted profile. Requires
/// alpha < d.
std::pair<double, double> j_p_operators(const Field& u, const Point& x, double alpha,
                                        const RadialProfile& profile, const ConvolutionContext& ctx);

/// Regularized Poisson data f_delta = K*_delta f (scalar path). The returned
/// field carries an analytic gradient.
Field mollify_data(const Field& f, const ConvolutionContext& ctx);

/// Dual-pair path: f_delta = K* f0 - div K~* f1.
Field mollify_data(const DualDatum& f, const ConvolutionContext& ctx);

/// Generalized distance lambda_bar = K_eps[dist] with empirical kappa0/kappa1
/// reported from a sample grid; continuous up to the boundary where it
/// matches dist exactly. Throws if eps is not an admissible bulk horizon for
/// the base rule.
DistanceField smoothed_distance(const Domain& dom, double eps, const RadialProfile& psi,
                                QKind qkind);

} // namespace nlbvp
