#pragma once

#include "nlbvp/geometry.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/localization.hpp"

#include <vector>

namespace nlbvp {

struct Rule1D {
  std::vector<double> x, w;
  int size() const { return static_cast<int>(x.size()); }
};

/// Gauss-Legendre on [-1,1].
Rule1D gauss_legendre(int n);
/// Gauss-Legendre mapped to [a,b].
Rule1D gauss_legendre_on(double a, double b, int n);
/// Gauss-Jacobi for int_0^1 f(r) r^gamma dr, gamma > -1.
Rule1D gauss_jacobi01(int n, double gamma);

/// Composite radial rule for int_0^{knots.back()} f(r) r^gamma dr: Jacobi on
/// the first segment (absorbs the endpoint singularity), Gauss-Legendre with
/// the weight folded in on the rest.
Rule1D radial_rule(double gamma, const std::vector<double>& knots, int n_per_segment);

/// Radial rule on [eps, rmax] for the truncated kernels; geometric subdivision
/// from eps handles the steep weight.
Rule1D radial_rule_truncated(double gamma, double eps, const std::vector<double>& knots,
                             int n_per_segment);

struct SphereRule {
  std::vector<Point> omega;
  std::vector<double> w; ///< sums to sigma(S^{d-1})
  int size() const { return static_cast<int>(omega.size()); }
};

/// d=1: the two points {-1,+1} with unit weights. d=2: n-point trapezoid on
/// the circle (spectrally accurate for smooth integrands).
SphereRule sphere_rule(int d, int n = 128);

/// Quadrature on the hemisphere {w : theta.w > 0}, total weight sigma/2.
SphereRule hemisphere_rule(int d, const Point& theta, int n = 64);

/// Product rule on the unit ball with the radial weight |z|^w absorbed into
/// the weights: sum_i W_i g(z_i) ~= int_B g(z) |z|^w dz.
struct BallRule {
  int d = 1;
  double w_exp = 0;
  std::vector<Point> z;
  std::vector<double> w;
  int size() const { return static_cast<int>(z.size()); }
};

/// Requires w_exp > -d. radial_knots are the profile breakpoints (the rule
/// integrates exactly through them); the last knot is the support radius.
BallRule ball_rule(int d, double w_exp, int n_radial, int n_angular,
                   const std::vector<double>& radial_knots = {1.0});

/// Ball rule with the radial range truncated to [eps, knots.back()].
BallRule ball_rule_truncated(int d, double w_exp, double eps, int n_radial, int n_angular,
                             const std::vector<double>& radial_knots = {1.0});

struct OmegaRule {
  std::vector<Point> x;
  std::vector<double> w;
  std::vector<int> cell; ///< generating cell, or -1 for analytic rules
  int size() const { return static_cast<int>(x.size()); }
  double total() const;
};

/// Per-cell Gauss rule over a mesh; weights sum to |Omega|.
OmegaRule omega_rule(const Mesh& mesh, int order = 3);

/// 1D composite rule on [a,b] geometrically graded toward both endpoints;
/// used by the verification studies to resolve boundary layers.
OmegaRule graded_interval_rule(double a, double b, double edge, int order, int levels);

struct ZetaResult {
  Point point;     ///< x + eta_eps(x) z
  double jacobian; ///< det grad zeta = 1 + grad eta_eps(x) . z
};

/// The forward interaction map zeta_z^eps(x). Asserts the image stays in the
/// domain and the determinant exceeds 2/3; violations throw.
ZetaResult zeta_map(const LocalizationRule& rule, const Horizon& eps, const Point& x,
                    const Point& z, const Domain& dom);

struct UpsilonResult {
  Point upsilon;      ///< (y - x) / eta_delta(y)
  double jacobian_det; ///< det grad upsilon
};

/// The dual interaction map upsilon_x^delta(y); requires |upsilon| <= 1.
UpsilonResult upsilon_map(const LocalizationRule& rule, const Horizon& h, const Point& x,
                          const Point& y);

/// Solves y = x + eta_delta(y) z for y (the inverse of upsilon); fixed-point
/// iteration, contraction rate kappa1*delta < 1/3.
Point upsilon_inverse(const LocalizationRule& rule, const Horizon& h, const Point& x,
                      const Point& z);

/// Jacobian factor eta_delta(y) / (eta_delta(y) + grad eta_delta(y).(x-y)):
/// dy = eta^d * factor * dz under the upsilon inverse.
double upsilon_volume_factor(const LocalizationRule& rule, const Horizon& h, const Point& x,
                             const Point& y);

/// Psi_{delta,alpha}(x) = int_Omega psi_{delta,alpha}(y,x) dy by dual-ball
/// quadrature; alpha < d.
double psi_mass(const RadialProfile& psi, const LocalizationRule& rule, const Horizon& h,
                double alpha, const Point& x, int n_radial = 24, int n_angular = 64);

} // namespace nlbvp
