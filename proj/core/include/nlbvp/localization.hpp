#pragma once

#include "nlbvp/geometry.hpp"

#include <string>

namespace nlbvp {

enum class QKind { Identity, Arctan, Power };

/// The localization profile q together with its verified constants and the
/// generalized distance it composes with. Only the built-in kinds are
/// supported; their derivatives are analytic.
struct LocalizationRule {
  QKind kind = QKind::Identity;
  int power_j = 2;              ///< exponent for the power kind (2 or 3)
  int vanishing_order = 1;      ///< N: first nonzero derivative of q at 0
  double qN_at_zero = 1.0;      ///< q^{(N)}(0)
  double doubling_constant = 2; ///< C_q
  double positivity_radius = 1; ///< c_q
  DistanceField lambda;

  /// q^{(order)}(r) for order in {0,1,2}. Throws std::domain_error for r < 0.
  double q(double r, int order = 0) const;
};

/// Builds a rule of the given kind over a distance field. The constants
/// (N, q^{(N)}(0), C_q, c_q) are set per kind; C_q for power kinds is
/// measured on a log grid.
LocalizationRule make_rule(QKind kind, DistanceField lambda, int power_j = 2);

QKind parse_qkind(const std::string& s, int* power_j);

struct Horizon {
  double delta = 0;
  double delta_max = 0; ///< admissibility threshold for this rule
};

/// 1 / (3 max{1, kappa1, C_q kappa0^log2(C_q)}).
double horizon_threshold(const LocalizationRule& rule);

/// Validates delta against the threshold and packages the pair.
Horizon make_horizon(const LocalizationRule& rule, double delta);

/// eta_delta(x) = delta * q(lambda(x)); zero exactly on the boundary.
double eta(const LocalizationRule& rule, const Horizon& h, const Point& x);

/// grad eta_delta = delta * q'(lambda) * grad lambda (defined a.e.).
Point eta_gradient(const LocalizationRule& rule, const Horizon& h, const Point& x);

struct RuleReport {
  bool pass = true;
  std::string violated_clause; ///< empty on pass
  double sample_r = 0;         ///< first offending sample
};

/// Numerically re-checks the rule's declared constants on a log-spaced grid:
/// q(0)=0, 0<q<=r, 0<=q'<=1, q'>0 on (0,c_q], doubling with the declared C_q,
/// and the declared vanishing order at 0.
RuleReport validate_rule(const LocalizationRule& rule, int grid_points = 160);

struct ComparabilityReport {
  double ratio = 0;  ///< eta(y)/eta(x)
  bool in_range = false;
  bool sandwich_ok = false; ///< (1-k1 d) <= ratio <= (1+k1 d)
};

/// Checks the horizon comparability sandwich for |x-y| <= eta_delta(x).
ComparabilityReport comparability_margin(const LocalizationRule& rule, const Horizon& h,
                                         const Point& x, const Point& y);

} // namespace nlbvp
