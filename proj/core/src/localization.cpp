#include "nlbvp/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace nlbvp {

namespace {

constexpr double kBlendLo = 0.9;
constexpr double kBlendHi = 1.1;

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Cubic Hermite blend of q' on [kBlendLo, kBlendHi]: matches the power branch
// value and slope at the left knot and flattens to zero at the right knot,
// so q is C^2 across the plateau transition.
struct PowerBlend {
  double v0, s0, L;
  explicit PowerBlend(int j)
      : v0(std::pow(kBlendLo, j - 1) / factorial(j - 1)),
        s0(j >= 2 ? std::pow(kBlendLo, j - 2) / factorial(j - 2) : 0.0),
        L(kBlendHi - kBlendLo) {}

  double qp(double r) const { // q'
    const double t = (r - kBlendLo) / L;
    const double h00 = ((2 * t - 3) * t) * t + 1;
    const double h10 = ((t - 2) * t + 1) * t;
    return v0 * h00 + L * s0 * h10;
  }
  double qpp(double r) const { // q''
    const double t = (r - kBlendLo) / L;
    const double dh00 = 6 * t * (t - 1);
    const double dh10 = (3 * t - 4) * t + 1;
    return (v0 * dh00 + L * s0 * dh10) / L;
  }
  double integral(double r) const { // int_{kBlendLo}^{r} q'
    const double t = (r - kBlendLo) / L;
    const double i00 = ((0.5 * t - 1) * t * t + 1) * t;
    const double i10 = ((0.25 * t - 2.0 / 3.0) * t + 0.5) * t * t;
    return L * (v0 * i00 + L * s0 * i10);
  }
};

double q_power(int j, double r, int order) {
  const PowerBlend blend(j);
  const double fj = factorial(j);
  if (r <= kBlendLo) {
    switch (order) {
      case 0: return std::pow(r, j) / fj;
      case 1: return std::pow(r, j - 1) / factorial(j - 1);
      default: return j >= 2 ? std::pow(r, j - 2) / factorial(j - 2) : 0.0;
    }
  }
  if (r < kBlendHi) {
    switch (order) {
      case 0: return std::pow(kBlendLo, j) / fj + blend.integral(r);
      case 1: return blend.qp(r);
      default: return blend.qpp(r);
    }
  }
  switch (order) {
    case 0: return std::pow(kBlendLo, j) / fj + blend.integral(kBlendHi);
    default: return 0.0;
  }
}

} // namespace

double LocalizationRule::q(double r, int order) const {
  if (r < 0) throw std::domain_error("q is defined for r >= 0");
  if (order < 0 || order > 2) throw std::invalid_argument("q derivative order must be 0, 1, or 2");
  switch (kind) {
    case QKind::Identity:
      switch (order) {
        case 0: return r;
        case 1: return 1.0;
        default: return 0.0;
      }
    case QKind::Arctan:
      switch (order) {
        case 0: return (2.0 / M_PI) * std::atan(r);
        case 1: return (2.0 / M_PI) / (1 + r * r);
        default: return (2.0 / M_PI) * (-2 * r) / ((1 + r * r) * (1 + r * r));
      }
    case QKind::Power: return q_power(power_j, r, order);
  }
  return 0;
}

LocalizationRule make_rule(QKind kind, DistanceField lambda, int power_j) {
  LocalizationRule rule;
  rule.kind = kind;
  rule.lambda = std::move(lambda);
  switch (kind) {
    case QKind::Identity:
      rule.vanishing_order = 1;
      rule.qN_at_zero = 1.0;
      rule.doubling_constant = 2.0;
      rule.positivity_radius = 1.0;
      break;
    case QKind::Arctan:
      rule.vanishing_order = 1;
      rule.qN_at_zero = 2.0 / M_PI;
      rule.doubling_constant = 2.0; // sup q(2r)/q(r) = lim_{r->0} = 2 by concavity
      rule.positivity_radius = 1.0;
      break;
    case QKind::Power: {
      if (power_j != 2 && power_j != 3)
        throw std::invalid_argument("power rule supports j in {2,3}");
      rule.power_j = power_j;
      rule.vanishing_order = power_j;
      rule.qN_at_zero = 1.0;
      rule.positivity_radius = 1.0;
      double cq = 0;
      for (int i = 0; i <= 4000; ++i) {
        const double r = std::pow(10.0, -9.0 + 11.0 * i / 4000.0);
        cq = std::max(cq, rule.q(2 * r) / rule.q(r));
      }
      rule.doubling_constant = cq * (1 + 1e-6);
      break;
    }
  }
  return rule;
}

QKind parse_qkind(const std::string& s, int* power_j) {
  if (power_j) *power_j = 2;
  if (s == "identity") return QKind::Identity;
  if (s == "arctan") return QKind::Arctan;
  if (s.rfind("power:", 0) == 0) {
    if (power_j) *power_j = std::stoi(s.substr(6));
    return QKind::Power;
  }
  throw std::invalid_argument("unknown q kind: " + s);
}

double horizon_threshold(const LocalizationRule& rule) {
  const double k0 = rule.lambda.kappa0, k1 = rule.lambda.kappa1, cq = rule.doubling_constant;
  const double m = std::max({1.0, k1, cq * std::pow(k0, std::log2(cq))});
  return 1.0 / (3.0 * m);
}

Horizon make_horizon(const LocalizationRule& rule, double delta) {
  const double d0 = horizon_threshold(rule);
  if (!(delta > 0 && delta < d0)) {
    throw std::invalid_argument("bulk horizon delta = " + std::to_string(delta) +
                                " must lie in (0, " + std::to_string(d0) + ")");
  }
  return Horizon{delta, d0};
}

double eta(const LocalizationRule& rule, const Horizon& h, const Point& x) {
  return h.delta * rule.q(rule.lambda.value(x));
}

Point eta_gradient(const LocalizationRule& rule, const Horizon& h, const Point& x) {
  const double qp = rule.q(rule.lambda.value(x), 1);
  return (h.delta * qp) * rule.lambda.gradient(x);
}

RuleReport validate_rule(const LocalizationRule& rule, int grid_points) {
  RuleReport rep;
  auto fail = [&](const char* clause, double r) {
    rep.pass = false;
    rep.violated_clause = clause;
    rep.sample_r = r;
    return rep;
  };
  if (std::abs(rule.q(0.0)) > 1e-15) return fail("q(0) = 0", 0);
  for (int i = 0; i < grid_points; ++i) {
    const double r = std::pow(10.0, -8.0 + 8.7 * i / (grid_points - 1));
    const double qr = rule.q(r);
    if (!(qr > 0)) return fail("q(r) > 0", r);
    if (qr > r * (1 + 1e-12)) return fail("q(r) <= r", r);
    const double qp = rule.q(r, 1);
    if (qp < -1e-14) return fail("q'(r) >= 0", r);
    if (qp > 1 + 1e-12) return fail("q'(r) <= 1", r);
    if (r <= rule.positivity_radius && !(qp > 0)) return fail("q'(r) > 0 on (0,c_q]", r);
    if (rule.q(2 * r) > rule.doubling_constant * qr * (1 + 1e-10)) return fail("doubling", r);
  }
  for (int k = 1; k < std::min(rule.vanishing_order, 3); ++k)
    if (std::abs(rule.q(0.0, k)) > 1e-14) return fail("vanishing order", 0);
  if (!(rule.qN_at_zero > 0)) return fail("q^(N)(0) > 0", 0);
  const double r0 = 1e-4;
  const double lead = rule.qN_at_zero * std::pow(r0, rule.vanishing_order) /
                      factorial(rule.vanishing_order);
  if (std::abs(rule.q(r0) / lead - 1) > 1e-5) return fail("vanishing order", r0);
  return rep;
}

ComparabilityReport comparability_margin(const LocalizationRule& rule, const Horizon& h,
                                         const Point& x, const Point& y) {
  ComparabilityReport rep;
  const double ex = eta(rule, h, x);
  rep.in_range = norm(y - x) <= ex && ex > 0;
  if (!rep.in_range) return rep;
  rep.ratio = eta(rule, h, y) / ex;
  const double slack = rule.lambda.kappa1 * h.delta;
  rep.sandwich_ok = rep.ratio >= 1 - slack - 1e-12 && rep.ratio <= 1 + slack + 1e-12;
  return rep;
}

} // namespace nlbvp
