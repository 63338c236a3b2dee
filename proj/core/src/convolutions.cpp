#include "nlbvp/convolutions.hpp"

#include <cmath>
#include <stdexcept>

namespace nlbvp {

namespace {

constexpr double kEtaFloor = 1e-14;

struct DualNode {
  Point y;
  double factor; ///< eta(y) / (eta(y) + grad eta(y).(x-y)); dy = eta^d * factor * dz
};

DualNode dual_node(const ConvolutionContext& ctx, const Point& x, const Point& z) {
  DualNode n;
  n.y = upsilon_inverse(ctx.rule, ctx.horizon, x, z);
  n.factor = upsilon_volume_factor(ctx.rule, ctx.horizon, x, n.y);
  return n;
}

} // namespace

ConvolutionContext make_convolution(RadialProfile psi, LocalizationRule rule, double delta,
                                    int n_radial, int n_angular) {
  ConvolutionContext ctx;
  ctx.horizon = make_horizon(rule, delta);
  ctx.ball = ball_rule(rule.lambda.dim, 0.0, n_radial, n_angular, psi.knots());
  ctx.psi = std::move(psi);
  ctx.rule = std::move(rule);
  return ctx;
}

double k_delta(const Field& u, const Point& x, const ConvolutionContext& ctx) {
  const double e = eta(ctx.rule, ctx.horizon, x);
  if (e <= kEtaFloor) return u(x);
  double s = 0;
  for (int i = 0; i < ctx.ball.size(); ++i)
    s += ctx.ball.w[i] * ctx.psi(norm(ctx.ball.z[i])) * u(x + e * ctx.ball.z[i]);
  return s;
}

double k_delta_star(const Field& u, const Point& x, const ConvolutionContext& ctx) {
  if (eta(ctx.rule, ctx.horizon, x) <= kEtaFloor) return 0;
  double s = 0;
  for (int i = 0; i < ctx.ball.size(); ++i) {
    const DualNode n = dual_node(ctx, x, ctx.ball.z[i]);
    s += ctx.ball.w[i] * ctx.psi(norm(ctx.ball.z[i])) * u(n.y) * n.factor;
  }
  return s;
}

Point k_tilde(const VectorField& v, const Point& x, const ConvolutionContext& ctx) {
  const double e = eta(ctx.rule, ctx.horizon, x);
  if (e <= kEtaFloor) return v(x);
  const Point ge = eta_gradient(ctx.rule, ctx.horizon, x);
  Point s{0, 0};
  for (int i = 0; i < ctx.ball.size(); ++i) {
    const Point& z = ctx.ball.z[i];
    const Point vy = v(x + e * z);
    const double w = ctx.ball.w[i] * ctx.psi(norm(z));
    s = s + w * (vy + dot(z, vy) * ge);
  }
  return s;
}

Point k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx) {
  if (eta(ctx.rule, ctx.horizon, x) <= kEtaFloor) return {0, 0};
  Point s{0, 0};
  for (int i = 0; i < ctx.ball.size(); ++i) {
    const Point& z = ctx.ball.z[i];
    const DualNode n = dual_node(ctx, x, z);
    const Point vy = v(n.y);
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, n.y);
    const double w = ctx.ball.w[i] * ctx.psi(norm(z)) * n.factor;
    s = s + w * (vy - dot(gey, vy) * z);
  }
  return s;
}

Point grad_k_delta_star(const Field& u, const Point& x, const ConvolutionContext& ctx) {
  // grad_x K* u(x) = -int_B psi'(|z|) zhat u(y(z)) / (eta(y) + grad eta(y).(x-y)) dz
  if (eta(ctx.rule, ctx.horizon, x) <= kEtaFloor) return {0, 0};
  Point out{0, 0};
  for (int i = 0; i < ctx.ball.size(); ++i) {
    const Point& z = ctx.ball.z[i];
    const double r = norm(z);
    if (r < 1e-300) continue;
    const DualNode n = dual_node(ctx, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, n.y);
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, n.y);
    const double denom = ey + dot(gey, x - n.y);
    const double w = -ctx.ball.w[i] * ctx.psi.deriv(r) * u(n.y) / (r * denom);
    out = out + w * z;
  }
  return out;
}

double div_k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx) {
  const int d = ctx.dim();
  if (eta(ctx.rule, ctx.horizon, x) <= kEtaFloor) return 0;
  double s = 0;
  for (int i = 0; i < ctx.ball.size(); ++i) {
    const Point& z = ctx.ball.z[i];
    const double r = norm(z);
    const DualNode n = dual_node(ctx, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, n.y);
    if (ey <= kEtaFloor) continue;
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, n.y);
    const Point vy = v(n.y);
    const double c = dot(gey, vy) / ey;
    const Point zhat = r > 0 ? (1.0 / r) * z : Point{0, 0};
    const double inner = -ctx.psi.deriv(r) * (dot(zhat, vy) - ey * r * c) / ey + d * c * ctx.psi(r);
    s += ctx.ball.w[i] * n.factor * inner;
  }
  return s;
}

Point grad_div_k_tilde_star(const VectorField& v, const Point& x, const ConvolutionContext& ctx) {
  const int d = ctx.dim();
  if (eta(ctx.rule, ctx.horizon, x) <= kEtaFloor) return {0, 0};
  // in 2D the transverse term carries a 1/|z| weight; absorb it into the rule
  const BallRule* ball = &ctx.ball;
  BallRule singular;
  if (d == 2) {
    singular = ball_rule(d, -1.0, 24, 64, ctx.psi.knots());
    ball = &singular;
  }
  Point s{0, 0};
  for (int i = 0; i < ball->size(); ++i) {
    const Point& z = ball->z[i];
    const double r = norm(z);
    if (r < 1e-300) continue;
    const DualNode n = dual_node(ctx, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, n.y);
    if (ey <= kEtaFloor) continue;
    const Point gey = eta_gradient(ctx.rule, ctx.horizon, n.y);
    const Point vy = v(n.y);
    const double c = dot(gey, vy) / ey;
    const Point zhat = (1.0 / r) * z;
    const Point ehat = (-1.0) * zhat; // (x-y)/|x-y|
    const Point A = vy - (ey * r * c) * zhat; // A = v(y) - (y-x) c
    const double eA = dot(ehat, A);
    // smooth part: psi''(r) ehat (ehat.A)/eta^2 + (d+1) c psi'(r) ehat / eta
    Point integrand = (ctx.psi.deriv2(r) * eA / (ey * ey)) * ehat +
                      ((d + 1) * c * ctx.psi.deriv(r) / ey) * ehat;
    if (d == 2) {
      // transverse part psi'(r) (I - ehat x ehat) A / (eta^2 |z|); the rule
      // already carries the 1/|z| weight, so scale the smooth part by |z|
      const Point perp = A - eA * ehat;
      integrand = r * integrand;
      integrand = integrand + (ctx.psi.deriv(r) / (ey * ey)) * perp;
    }
    s = s + (ball->w[i] * n.factor) * integrand;
  }
  return s;
}

std::pair<double, double> j_p_operators(const Field& u, const Point& x, double alpha,
                                        const RadialProfile& profile,
                                        const ConvolutionContext& ctx) {
  const int d = ctx.dim();
  if (!(alpha >= 0 && alpha < d))
    throw std::invalid_argument("J/P operators require 0 <= alpha < d");
  const double ex = eta(ctx.rule, ctx.horizon, x);
  if (ex <= kEtaFloor) throw std::domain_error("J/P operators need an interior point");
  const BallRule ball = ball_rule(d, -alpha, 24, 64, profile.knots());
  double P = 0, num = 0;
  for (int i = 0; i < ball.size(); ++i) {
    const Point& z = ball.z[i];
    const double pr = profile(norm(z));
    // x-centered piece
    const Point y1 = x + ex * z;
    const double w1 = ball.w[i] * pr / (ex * ex);
    P += w1;
    num += w1 * u(y1);
    // adjoint piece
    const DualNode n = dual_node(ctx, x, z);
    const double ey = eta(ctx.rule, ctx.horizon, n.y);
    if (ey <= kEtaFloor) continue;
    const double w2 = ball.w[i] * pr * n.factor / (ey * ey);
    P += w2;
    num += w2 * u(n.y);
  }
  return {num / P, P};
}

Field mollify_data(const Field& f, const ConvolutionContext& ctx) {
  return Field::closed_form(
      [f, ctx](const Point& x) { return k_delta_star(f, x, ctx); },
      [f, ctx](const Point& x) { return grad_k_delta_star(f, x, ctx); });
}

Field mollify_data(const DualDatum& f, const ConvolutionContext& ctx) {
  return Field::closed_form(
      [f, ctx](const Point& x) {
        return k_delta_star(f.f0, x, ctx) - div_k_tilde_star(f.f1, x, ctx);
      },
      [f, ctx](const Point& x) {
        return grad_k_delta_star(f.f0, x, ctx) - grad_div_k_tilde_star(f.f1, x, ctx);
      });
}

DistanceField smoothed_distance(const Domain& dom, double eps, const RadialProfile& psi,
                                QKind qkind) {
  LocalizationRule base = make_rule(qkind, exact_distance(dom));
  const double d0 = horizon_threshold(base);
  if (!(eps > 0 && eps < d0))
    throw std::invalid_argument("smoothing scale eps = " + std::to_string(eps) +
                                " is not below the horizon threshold " + std::to_string(d0));
  ConvolutionContext ctx = make_convolution(psi, base, eps);
  const Field dist = Field::closed_form(
      [dom](const Point& x) { return distance_to_boundary(dom, x); });
  const VectorField dist_grad = VectorField::closed_form([dom](const Point& x) {
    const Point xi = boundary_projection(dom, x);
    Point g = x - xi;
    const double n = norm(g);
    if (n < 1e-14) {
      const Point nu = outward_normal(dom, x);
      return Point{-nu[0], -nu[1]};
    }
    return (1.0 / n) * g;
  });

  DistanceField out;
  out.dim = dom.dim();
  out.smoothed = true;
  out.value = [dist, ctx](const Point& x) { return k_delta(dist, x, ctx); };
  out.gradient = [dist_grad, ctx](const Point& x) { return k_tilde(dist_grad, x, ctx); };

  // empirical comparability constants on a sample grid
  double k0 = 1.0, k1 = 0.0;
  auto visit = [&](const Point& x) {
    const double de = distance_to_boundary(dom, x);
    if (de < 1e-9) return;
    const double lb = out.value(x);
    k0 = std::max({k0, lb / de, de / lb});
    k1 = std::max(k1, norm(out.gradient(x)));
  };
  if (dom.dim() == 1) {
    const double a = dom.interval_a(), b = dom.interval_b();
    for (int i = 1; i < 1000; ++i) visit({a + (b - a) * i / 1000.0, 0});
  } else {
    for (int i = 1; i < 32; ++i)
      for (int j = 1; j < 32; ++j) {
        const double u = i / 32.0, v = j / 32.0;
        Point x;
        if (dom.kind() == DomainKind::Rectangle) {
          x = {dom.rect_lo()[0] + u * (dom.rect_hi()[0] - dom.rect_lo()[0]),
               dom.rect_lo()[1] + v * (dom.rect_hi()[1] - dom.rect_lo()[1])};
        } else {
          const double r = dom.kind() == DomainKind::Disk ? dom.disk_radius() : dom.diameter();
          const Point c = dom.kind() == DomainKind::Disk ? dom.disk_center() : Point{0, 0};
          x = {c[0] + (2 * u - 1) * r, c[1] + (2 * v - 1) * r};
          if (!dom.contains(x)) continue;
        }
        visit(x);
      }
  }
  out.kappa0 = k0 * (1 + 1e-9);
  out.kappa1 = std::max(1.0, k1) * (1 + 1e-6);
  return out;
}

} // namespace nlbvp
