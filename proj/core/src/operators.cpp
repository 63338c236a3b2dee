#include "nlbvp/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace nlbvp {

namespace {

constexpr double kEtaFloor = 1e-14;

// difference quotient (u(x) - u(y)) / |x - y|
inline double quotient(const Field& u, const Point& x, const Point& y, double dist) {
  return (u(x) - u(y)) / dist;
}

// Taylor remainder R[u](x, b) = -int_0^1 (hess u(x+tb) bhat . bhat) (1-t) dt
double taylor_remainder(const Field& u, const Point& x, const Point& b) {
  static const Rule1D gl = gauss_legendre_on(0, 1, 8);
  const double nb = norm(b);
  if (nb < 1e-300) return 0;
  const Point bh = (1.0 / nb) * b;
  double r = 0;
  for (int i = 0; i < gl.size(); ++i) {
    const auto H = u.hess(x + gl.x[i] * b);
    const double quad =
        H[0] * bh[0] * bh[0] + (H[1] + H[2]) * bh[0] * bh[1] + H[3] * bh[1] * bh[1];
    r -= gl.w[i] * quad * (1 - gl.x[i]);
  }
  return r;
}

} // namespace

FormContext FormContext::with_delta(double delta) const {
  FormContext out = *this;
  out.horizon = make_horizon(out.rule, delta);
  return out;
}

FormContext make_context(const Domain& dom, LocalizationRule rule, double delta, double p,
                         double beta, int n_radial, int n_angular) {
  if (!(beta >= 0 && beta < dom.dim() + p))
    throw std::invalid_argument("beta must lie in [0, d+p)");
  FormContext ctx;
  ctx.d = dom.dim();
  ctx.p = p;
  ctx.beta = beta;
  ctx.domain = dom;
  ctx.horizon = make_horizon(rule, delta);
  ctx.rule = std::move(rule);
  ctx.rho = mollified_indicator();
  ctx.constants = calibrate_rho(ctx.rho, ctx.d, p, beta);
  ctx.phi = Nonlinearity{p, 1, 1};
  ctx.n_radial = n_radial;
  ctx.n_angular = n_angular + (n_angular % 2); // antipodal symmetry
  ctx.ball_gamma = ball_rule(ctx.d, p - beta, n_radial, ctx.n_angular, {1.0});
  ctx.ball_rho = ball_rule(ctx.d, p - beta, n_radial, ctx.n_angular, ctx.rho.knots());
  if (beta < ctx.d + p - 1)
    ctx.ball_rho_op = ball_rule(ctx.d, p - beta - 1, n_radial, ctx.n_angular, ctx.rho.knots());
  if (ctx.d == 1) {
    ctx.omega = graded_interval_rule(dom.interval_a(), dom.interval_b(),
                                     1e-7 * dom.diameter(), 6, 26);
  } else {
    const Mesh background = build_mesh(dom, dom.diameter() / 24.0);
    ctx.omega = omega_rule(background, 4);
  }
  return ctx;
}

double seminorm(const Field& u, const FormContext& ctx) {
  if (!(ctx.beta < ctx.d + ctx.p)) throw std::invalid_argument("seminorm requires beta < d+p");
  double total = 0;
  for (int i = 0; i < ctx.omega.size(); ++i) {
    const Point& x = ctx.omega.x[i];
    const double e = eta(ctx.rule, ctx.horizon, x);
    if (e <= 10 * kEtaFloor) continue;
    double inner = 0;
    for (int k = 0; k < ctx.ball_gamma.size(); ++k) {
      const Point& z = ctx.ball_gamma.z[k];
      const double r = norm(z);
      const double du = quotient(u, x, x + e * z, e * r);
      inner += ctx.ball_gamma.w[k] * std::pow(std::abs(du), ctx.p);
    }
    total += ctx.omega.w[i] * inner;
  }
  return std::pow(ctx.constants.C_dbp * total, 1.0 / ctx.p);
}

double energy(const Field& u, const FormContext& ctx) {
  double total = 0;
  for (int i = 0; i < ctx.omega.size(); ++i) {
    const Point& x = ctx.omega.x[i];
    const double e = eta(ctx.rule, ctx.horizon, x);
    if (e <= 10 * kEtaFloor) continue;
    double inner = 0;
    for (int k = 0; k < ctx.ball_rho.size(); ++k) {
      const Point& z = ctx.ball_rho.z[k];
      const double r = norm(z);
      const double du = quotient(u, x, x + e * z, e * r);
      inner += ctx.ball_rho.w[k] * ctx.rho(r) * ctx.phi.phi(du);
    }
    total += ctx.omega.w[i] * inner;
  }
  return total;
}

double bilinear(const Field& u, const Field& v, const FormContext& ctx) {
  double total = 0;
  for (int i = 0; i < ctx.omega.size(); ++i) {
    const Point& x = ctx.omega.x[i];
    const double e = eta(ctx.rule, ctx.horizon, x);
    if (e <= 10 * kEtaFloor) continue;
    const double ux = u(x), vx = v(x);
    double inner = 0;
    for (int k = 0; k < ctx.ball_rho.size(); ++k) {
      const Point& z = ctx.ball_rho.z[k];
      const double r = norm(z);
      const Point y = x + e * z;
      const double dist = e * r;
      const double du = (ux - u(y)) / dist;
      const double dv = (vx - v(y)) / dist;
      inner += ctx.ball_rho.w[k] * ctx.rho(r) * ctx.phi.dphi(du) * dv;
    }
    total += ctx.omega.w[i] * inner;
  }
  return total;
}

double local_bilinear(const Field& u, const Field& v, const FormContext& ctx) {
  const double scale = ctx.constants.rho_bar / ctx.constants.cbar_dp;
  double total = 0;
  for (int i = 0; i < ctx.omega.size(); ++i) {
    const Point g = u.grad(ctx.omega.x[i]);
    const double gn = norm(g);
    const double mag = gn > 0 ? std::pow(gn, ctx.p - 2) : (ctx.p == 2 ? 1.0 : 0.0);
    total += ctx.omega.w[i] * scale * mag * dot(g, v.grad(ctx.omega.x[i]));
  }
  return total;
}

double local_operator(const Field& u, const Point& x, const FormContext& ctx) {
  const double scale = ctx.constants.rho_bar / ctx.constants.cbar_dp;
  const Point g = u.grad(x);
  const auto H = u.hess(x);
  const double lap = H[0] + H[3];
  if (ctx.p == 2) return -scale * lap;
  const double gn = norm(g);
  if (gn == 0) return 0;
  const double gHg = H[0] * g[0] * g[0] + (H[1] + H[2]) * g[0] * g[1] + H[3] * g[1] * g[1];
  return -scale * (std::pow(gn, ctx.p - 2) * lap +
                   (ctx.p - 2) * std::pow(gn, ctx.p - 4) * gHg);
}

namespace {

// Shared core of the pointwise and truncated operators: x-centered and
// adjoint (y-centered) kernel halves in interaction-ball coordinates. The
// radial weight |z|^{p-beta-1} lives in the rule.
double operator_terms(const Field& u, const Point& x, const FormContext& ctx,
                      const BallRule& ball) {
  const double ex = eta(ctx.rule, ctx.horizon, x);
  if (ex <= 10 * kEtaFloor) throw std::domain_error("pointwise operator needs an interior point");
  const double ux = u(x);
  double t1 = 0, t2 = 0;
  for (int k = 0; k < ball.size(); ++k) {
    const Point& z = ball.z[k];
    const double r = norm(z);
    const double rho_r = ctx.rho(r);
    if (rho_r != 0) {
      const Point y = x + ex * z;
      t1 += ball.w[k] * rho_r * ctx.phi.dphi((ux - u(y)) / (ex * r));
    }
    const Point y2 = upsilon_inverse(ctx.rule, ctx.horizon, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, y2);
    if (ey <= kEtaFloor) continue;
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, y2);
    const double denom = ey + dot(gey, x - y2);
    t2 += ball.w[k] * rho_r * ctx.phi.dphi((ux - u(y2)) / (ey * r)) / denom;
  }
  return t1 / ex + t2;
}

} // namespace

OperatorSample apply_pointwise(const Field& u, const Point& x, const FormContext& ctx) {
  if (!(ctx.beta < ctx.d))
    throw std::domain_error("pointwise operator requires beta < d; use the truncated or weak form");
  OperatorSample s;
  s.x = x;
  s.value = operator_terms(u, x, ctx, ctx.ball_rho_op);
  if (u.has_hess()) {
    const auto split = split_D1_D2(u, x, ctx);
    s.D1 = split.first;
    s.D2 = split.second;
    s.has_split = true;
  }
  return s;
}

OperatorSample apply_truncated(const Field& u, const Point& x, double eps, const FormContext& ctx) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("truncation eps must be in (0,1)");
  OperatorSample s;
  s.x = x;
  s.eps = eps;
  if (ctx.rule.q(ctx.rule.lambda.value(x)) <= eps) return s; // gating indicator
  const BallRule ball =
      ball_rule_truncated(ctx.d, ctx.p - ctx.beta - 1, eps, ctx.n_radial, ctx.n_angular,
                          ctx.rho.knots());
  if (ball.size() == 0) return s;
  s.value = operator_terms(u, x, ctx, ball);
  return s;
}

std::pair<double, double> split_D1_D2(const Field& u, const Point& x, const FormContext& ctx) {
  if (!u.has_hess()) throw std::logic_error("D1/D2 split needs a Hessian");
  const double ex = eta(ctx.rule, ctx.horizon, x);
  if (ex <= 10 * kEtaFloor) throw std::domain_error("D1/D2 split needs an interior point");
  const Point gu = u.grad(x);
  const BallRule& ball = ctx.ball_rho_op;
  double d1 = 0, d2 = 0;
  for (int k = 0; k < ball.size(); ++k) {
    const Point& z = ball.z[k];
    const double r = norm(z);
    const double rho_r = ctx.rho(r);
    if (rho_r == 0) continue;
    const Point zh = (1.0 / r) * z;
    const double s0 = -dot(gu, zh); // grad u(x) . (x-y)/|x-y|
    // x-centered half of D2
    {
      const Point b = ex * z;
      const double T = (ex * r) * taylor_remainder(u, x, b);
      d2 += ball.w[k] * rho_r * (ctx.phi.dphi(s0 + T) - ctx.phi.dphi(s0)) / ex;
    }
    // adjoint half: D1 and the remaining D2 part
    const Point y = upsilon_inverse(ctx.rule, ctx.horizon, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, y);
    if (ey <= kEtaFloor) continue;
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, y);
    const double factor = ey / (ey + dot(gey, x - y));
    d1 += ball.w[k] * rho_r * ctx.phi.dphi(s0) *
          (ex - ey - dot(gey, x - y)) * factor / (ey * ex);
    const Point b = y - x;
    const double T = (ey * r) * taylor_remainder(u, x, b);
    d2 += ball.w[k] * rho_r * (ctx.phi.dphi(s0 + T) - ctx.phi.dphi(s0)) * factor / ey;
  }
  return {d1, d2};
}

} // namespace nlbvp
