#include "nlbvp/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nlbvp {

Rule1D gauss_legendre(int n) {
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = 2.0 / ((1 - x * x) * pp * pp);
    rule.w[n - 1 - i] = rule.w[i];
  }
  return rule;
}

Rule1D gauss_legendre_on(double a, double b, int n) {
  Rule1D g = gauss_legendre(n);
  for (int i = 0; i < n; ++i) {
    g.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
    g.w[i] *= 0.5 * (b - a);
  }
  return g;
}

Rule1D gauss_jacobi01(int n, double gamma) {
  if (!(gamma > -1)) throw std::invalid_argument("gauss_jacobi01 requires gamma > -1");
  // Golub-Welsch for the weight (1+x)^gamma on [-1,1], mapped to [0,1].
  const double a = 0, b = gamma;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  auto alpha = [&](int k) {
    if (k == 0) return (b - a) / (a + b + 2);
    const double s = 2 * k + a + b;
    return (b * b - a * a) / (s * (s + 2));
  };
  auto beta = [&](int k) {
    const double s = 2 * k + a + b;
    return 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1));
  };
  for (int k = 0; k < n; ++k) {
    J(k, k) = alpha(k);
    if (k > 0) {
      const double off = std::sqrt(beta(k));
      J(k, k - 1) = off;
      J(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, a + b + 1) * std::exp(std::lgamma(a + 1) + std::lgamma(b + 1) -
                                                         std::lgamma(a + b + 2));
  Rule1D rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double xi = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.x[i] = 0.5 * (1 + xi);
    rule.w[i] = mu0 * v0 * v0 * std::pow(2.0, -gamma - 1);
  }
  return rule;
}

Rule1D radial_rule(double gamma, const std::vector<double>& knots, int n) {
  if (knots.empty()) throw std::invalid_argument("radial_rule requires at least one knot");
  Rule1D rule;
  double lo = 0;
  for (size_t s = 0; s < knots.size(); ++s) {
    const double hi = knots[s];
    if (!(hi > lo)) continue;
    if (s == 0) {
      Rule1D j = gauss_jacobi01(n, gamma);
      const double scale = std::pow(hi, gamma + 1);
      for (int i = 0; i < n; ++i) {
        rule.x.push_back(hi * j.x[i]);
        rule.w.push_back(scale * j.w[i]);
      }
    } else {
      Rule1D g = gauss_legendre_on(lo, hi, n);
      for (int i = 0; i < n; ++i) {
        rule.x.push_back(g.x[i]);
        rule.w.push_back(g.w[i] * std::pow(g.x[i], gamma));
      }
    }
    lo = hi;
  }
  return rule;
}

Rule1D radial_rule_truncated(double gamma, double eps, const std::vector<double>& knots, int n) {
  Rule1D rule;
  const double rmax = knots.back();
  if (eps >= rmax) return rule;
  std::vector<double> brk;
  double t = eps;
  while (t < rmax) {
    brk.push_back(t);
    t *= 2;
  }
  for (double k : knots)
    if (k > eps && k < rmax) brk.push_back(k);
  brk.push_back(rmax);
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-15; }),
            brk.end());
  for (size_t s = 0; s + 1 < brk.size(); ++s) {
    Rule1D g = gauss_legendre_on(brk[s], brk[s + 1], n);
    for (int i = 0; i < g.size(); ++i) {
      rule.x.push_back(g.x[i]);
      rule.w.push_back(g.w[i] * std::pow(g.x[i], gamma));
    }
  }
  return rule;
}

SphereRule sphere_rule(int d, int n) {
  SphereRule s;
  if (d == 1) {
    s.omega = {{1, 0}, {-1, 0}};
    s.w = {1, 1};
  } else {
    s.omega.resize(n);
    s.w.assign(n, 2 * M_PI / n);
    for (int i = 0; i < n; ++i) {
      const double a = 2 * M_PI * i / n;
      s.omega[i] = {std::cos(a), std::sin(a)};
    }
  }
  return s;
}

SphereRule hemisphere_rule(int d, const Point& theta, int n) {
  SphereRule s;
  if (d == 1) {
    s.omega = {theta};
    s.w = {1};
    return s;
  }
  Rule1D g = gauss_legendre_on(-M_PI / 2, M_PI / 2, n);
  s.omega.resize(n);
  s.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(g.x[i]), sn = std::sin(g.x[i]);
    s.omega[i] = {c * theta[0] - sn * theta[1], sn * theta[0] + c * theta[1]};
    s.w[i] = g.w[i];
  }
  return s;
}

BallRule ball_rule(int d, double w_exp, int n_radial, int n_angular,
                   const std::vector<double>& radial_knots) {
  if (!(w_exp > -d)) throw std::invalid_argument("ball rule weight exponent must exceed -d");
  const Rule1D rad = radial_rule(w_exp + d - 1, radial_knots, n_radial);
  const SphereRule sph = sphere_rule(d, n_angular);
  BallRule b;
  b.d = d;
  b.w_exp = w_exp;
  for (int i = 0; i < rad.size(); ++i)
    for (int j = 0; j < sph.size(); ++j) {
      b.z.push_back(rad.x[i] * sph.omega[j]);
      b.w.push_back(rad.w[i] * sph.w[j]);
    }
  return b;
}

BallRule ball_rule_truncated(int d, double w_exp, double eps, int n_radial, int n_angular,
                             const std::vector<double>& radial_knots) {
  if (!(w_exp > -d)) throw std::invalid_argument("ball rule weight exponent must exceed -d");
  const Rule1D rad = radial_rule_truncated(w_exp + d - 1, eps, radial_knots, n_radial);
  const SphereRule sph = sphere_rule(d, n_angular);
  BallRule b;
  b.d = d;
  b.w_exp = w_exp;
  for (int i = 0; i < rad.size(); ++i)
    for (int j = 0; j < sph.size(); ++j) {
      b.z.push_back(rad.x[i] * sph.omega[j]);
      b.w.push_back(rad.w[i] * sph.w[j]);
    }
  return b;
}

double OmegaRule::total() const { return std::accumulate(w.begin(), w.end(), 0.0); }

OmegaRule omega_rule(const Mesh& mesh, int order) {
  OmegaRule r;
  if (mesh.dim == 1) {
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const double a = mesh.nodes[mesh.cells[c][0]][0], b = mesh.nodes[mesh.cells[c][1]][0];
      Rule1D g = gauss_legendre_on(std::min(a, b), std::max(a, b), std::max(order, 1));
      for (int i = 0; i < g.size(); ++i) {
        r.x.push_back({g.x[i], 0});
        r.w.push_back(g.w[i]);
        r.cell.push_back(c);
      }
    }
    return r;
  }
  // triangle rules in barycentric coordinates
  struct BaryPoint {
    double l0, l1, l2, w;
  };
  std::vector<BaryPoint> pts;
  if (order <= 2) {
    pts = {{2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
           {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
           {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3}};
  } else {
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    pts = {{1 - 2 * a1, a1, a1, w1}, {a1, 1 - 2 * a1, a1, w1}, {a1, a1, 1 - 2 * a1, w1},
           {1 - 2 * a2, a2, a2, w2}, {a2, 1 - 2 * a2, a2, w2}, {a2, a2, 1 - 2 * a2, w2}};
  }
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Point p0 = mesh.nodes[mesh.cells[c][0]], p1 = mesh.nodes[mesh.cells[c][1]],
                p2 = mesh.nodes[mesh.cells[c][2]];
    const double area = mesh.cell_measure(c);
    for (const auto& q : pts) {
      r.x.push_back(q.l0 * p0 + q.l1 * p1 + q.l2 * p2);
      r.w.push_back(q.w * area);
      r.cell.push_back(c);
    }
  }
  return r;
}

OmegaRule graded_interval_rule(double a, double b, double edge, int order, int levels) {
  std::vector<double> brk = {a, b};
  double step = edge;
  double lo = a, hi = b;
  for (int l = 0; l < levels && lo + step < hi - step; ++l) {
    lo += step;
    hi -= step;
    brk.push_back(lo);
    brk.push_back(hi);
    step *= 2;
  }
  std::sort(brk.begin(), brk.end());
  OmegaRule r;
  for (size_t s = 0; s + 1 < brk.size(); ++s) {
    if (!(brk[s + 1] > brk[s])) continue;
    Rule1D g = gauss_legendre_on(brk[s], brk[s + 1], order);
    for (int i = 0; i < g.size(); ++i) {
      r.x.push_back({g.x[i], 0});
      r.w.push_back(g.w[i]);
      r.cell.push_back(-1);
    }
  }
  return r;
}

ZetaResult zeta_map(const LocalizationRule& rule, const Horizon& eps, const Point& x,
                    const Point& z, const Domain& dom) {
  if (norm(z) > 1 + 1e-12) throw std::range_error("zeta map requires |z| <= 1");
  const double e = eta(rule, eps, x);
  const Point ge = eta_gradient(rule, eps, x);
  ZetaResult res;
  res.point = x + e * z;
  res.jacobian = 1 + dot(ge, z);
  if (!(res.jacobian > 2.0 / 3.0))
    throw std::runtime_error("zeta map determinant <= 2/3: configuration violates the horizon threshold");
  if (!dom.contains(res.point, 1e-12))
    throw std::runtime_error("zeta map image left the domain");
  return res;
}

UpsilonResult upsilon_map(const LocalizationRule& rule, const Horizon& h, const Point& x,
                          const Point& y) {
  const int d = rule.lambda.dim;
  const double ey = eta(rule, h, y);
  if (!(ey > 0)) throw std::range_error("upsilon map requires eta_delta(y) > 0");
  UpsilonResult res;
  res.upsilon = (1.0 / ey) * (y - x);
  if (norm(res.upsilon) > 1 + 1e-12)
    throw std::range_error("point y is not in the dual interaction set of x");
  const Point ge = eta_gradient(rule, h, y);
  res.jacobian_det = (ey + dot(ge, x - y)) / std::pow(ey, d + 1);
  const double k1d = rule.lambda.kappa1 * h.delta;
  const double lo = (1 - k1d) / std::pow(ey, d), hi = (1 + k1d) / std::pow(ey, d);
  if (res.jacobian_det < lo * (1 - 1e-9) || res.jacobian_det > hi * (1 + 1e-9))
    throw std::runtime_error("upsilon determinant left the comparability sandwich");
  return res;
}

Point upsilon_inverse(const LocalizationRule& rule, const Horizon& h, const Point& x,
                      const Point& z) {
  Point y = x;
  for (int it = 0; it < 80; ++it) {
    const Point ynext = x + eta(rule, h, y) * z;
    const double step = norm(ynext - y);
    y = ynext;
    if (step < 1e-16) break;
  }
  return y;
}

double upsilon_volume_factor(const LocalizationRule& rule, const Horizon& h, const Point& x,
                             const Point& y) {
  const double ey = eta(rule, h, y);
  const Point ge = eta_gradient(rule, h, y);
  return ey / (ey + dot(ge, x - y));
}

double psi_mass(const RadialProfile& psi, const LocalizationRule& rule, const Horizon& h,
                double alpha, const Point& x, int n_radial, int n_angular) {
  const int d = rule.lambda.dim;
  if (!(alpha < d)) throw std::invalid_argument("psi mass requires alpha < d");
  const BallRule ball = ball_rule(d, -alpha, n_radial, n_angular, psi.knots());
  double total = 0;
  for (int i = 0; i < ball.size(); ++i) {
    const Point y = upsilon_inverse(rule, h, x, ball.z[i]);
    total += ball.w[i] * psi(norm(ball.z[i])) * upsilon_volume_factor(rule, h, x, y);
  }
  // Lemma-bound sandwich against the flat-ball mass
  const Rule1D rad = radial_rule(-alpha + d - 1, psi.knots(), std::max(n_radial, 32));
  double mass = 0;
  for (int i = 0; i < rad.size(); ++i) mass += rad.w[i] * psi(rad.x[i]);
  mass *= sphere_measure(d);
  const double k1d = rule.lambda.kappa1 * h.delta;
  if (total < mass / (1 + k1d) * (1 - 1e-8) || total > mass / (1 - k1d) * (1 + 1e-8))
    throw std::runtime_error("psi mass left the kernel-integral sandwich");
  return total;
}

} // namespace nlbvp
