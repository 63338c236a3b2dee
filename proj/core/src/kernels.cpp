#include "nlbvp/kernels.hpp"

#include "nlbvp/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlbvp {

namespace {

// quintic smoothstep: s(0)=0, s(1)=1, first two derivatives vanish at both ends
double smoothstep5(double t) { return ((6 * t - 15) * t + 10) * t * t * t; }
double smoothstep5_d(double t) { return ((30 * t - 60) * t + 30) * t * t; }
double smoothstep5_dd(double t) { return ((120 * t - 180) * t + 60) * t; }

} // namespace

double RadialProfile::operator()(double t) const {
  t = std::abs(t);
  if (t >= support) return 0;
  if (kind == Kind::MollifiedIndicator) {
    if (t <= plateau) return scale;
    return scale * (1 - smoothstep5((t - plateau) / (support - plateau)));
  }
  const double u = (t / support) * (t / support);
  return scale * std::exp(-1.0 / (1.0 - u));
}

double RadialProfile::deriv(double t) const {
  const double sgn = t < 0 ? -1.0 : 1.0;
  t = std::abs(t);
  if (t >= support) return 0;
  if (kind == Kind::MollifiedIndicator) {
    if (t <= plateau) return 0;
    const double L = support - plateau;
    return -sgn * scale * smoothstep5_d((t - plateau) / L) / L;
  }
  const double u = (t / support) * (t / support);
  const double g1 = -(2 * t / (support * support)) / ((1 - u) * (1 - u));
  return sgn * scale * std::exp(-1.0 / (1.0 - u)) * g1;
}

double RadialProfile::deriv2(double t) const {
  t = std::abs(t);
  if (t >= support) return 0;
  if (kind == Kind::MollifiedIndicator) {
    if (t <= plateau) return 0;
    const double L = support - plateau;
    return -scale * smoothstep5_dd((t - plateau) / L) / (L * L);
  }
  const double s2 = support * support;
  const double u = t * t / s2;
  const double g1 = -(2 * t / s2) / ((1 - u) * (1 - u));
  const double g2 = -(2 / s2) / ((1 - u) * (1 - u)) - (8 * t * t / (s2 * s2)) / std::pow(1 - u, 3);
  return scale * std::exp(-1.0 / (1.0 - u)) * (g1 * g1 + g2);
}

std::vector<double> RadialProfile::knots() const {
  if (kind == Kind::MollifiedIndicator) return {plateau, support};
  return {support};
}

RadialProfile mollified_indicator(double plateau, double support) {
  if (!(0 < plateau && plateau < support && support < 1))
    throw std::invalid_argument("profile requires 0 < plateau < support < 1");
  RadialProfile r;
  r.kind = RadialProfile::Kind::MollifiedIndicator;
  r.plateau = plateau;
  r.support = support;
  return r;
}

RadialProfile bump_profile(double support) {
  if (!(0 < support && support < 1)) throw std::invalid_argument("bump support must be in (0,1)");
  RadialProfile r;
  r.kind = RadialProfile::Kind::Bump;
  r.plateau = 0;
  r.support = support;
  return r;
}

RadialProfile normalized_mollifier(int d, double support) {
  RadialProfile psi = bump_profile(support);
  const Rule1D rad = radial_rule(d - 1, psi.knots(), 48);
  double mass = 0;
  for (int i = 0; i < rad.size(); ++i) mass += rad.w[i] * psi(rad.x[i]);
  mass *= sphere_measure(d);
  psi.scale = 1.0 / mass;
  return psi;
}

double alpha_normalization(const RadialProfile& psi, double alpha, int d) {
  if (!(alpha < d)) throw std::invalid_argument("alpha-normalization requires alpha < d");
  const Rule1D rad = radial_rule(-alpha + d - 1, psi.knots(), 48);
  double mass = 0;
  for (int i = 0; i < rad.size(); ++i) mass += rad.w[i] * psi(rad.x[i]);
  mass *= sphere_measure(d);
  return 1.0 / mass;
}

double Nonlinearity::phi(double t) const { return std::pow(std::abs(t), p) / p; }

double Nonlinearity::dphi(double t) const {
  if (t == 0) return 0;
  return std::pow(std::abs(t), p - 2) * t;
}

double Nonlinearity::d2phi(double t) const {
  if (t == 0) return p == 2 ? 1.0 : 0.0;
  return (p - 1) * std::pow(std::abs(t), p - 2);
}

double sphere_measure(int d) {
  if (d == 1) return 2.0;
  if (d == 2) return 2 * M_PI;
  throw std::invalid_argument("dimension must be 1 or 2");
}

double cbar(int d, double p) {
  if (d != 1 && d != 2) throw std::invalid_argument("dimension must be 1 or 2");
  return std::exp(0.5 * std::log(M_PI) + std::lgamma((d + p) / 2.0) - std::lgamma((p + 1) / 2.0) -
                  std::lgamma(d / 2.0));
}

double normalization_constant(int d, double beta, double p) {
  if (!(beta >= 0 && beta < d + p))
    throw std::invalid_argument("normalization constant requires 0 <= beta < d+p");
  return cbar(d, p) * (d + p - beta) / sphere_measure(d);
}

double rho_moment(const RadialProfile& rho, double alpha, int d) {
  if (!(alpha > -d)) throw std::invalid_argument("rho moment diverges for alpha <= -d");
  const Rule1D rad = radial_rule(alpha + d - 1, rho.knots(), 48);
  double m = 0;
  for (int i = 0; i < rad.size(); ++i) m += rad.w[i] * rho(rad.x[i]);
  return m * sphere_measure(d);
}

KernelConstants calibrate_rho(RadialProfile& rho, int d, double p, double beta) {
  KernelConstants kc;
  kc.d = d;
  kc.p = p;
  kc.beta = beta;
  kc.cbar_dp = cbar(d, p);
  kc.sigma = sphere_measure(d);
  kc.C_dbp = normalization_constant(d, beta, p);
  const double moment = rho_moment(rho, p - beta, d);
  if (!(moment > 0)) throw std::runtime_error("rho calibration failed: zero moment");
  const double factor = kc.cbar_dp / moment;
  rho.scale *= factor;
  kc.rho_scale = rho.scale;
  kc.rho_bar = rho_moment(rho, p - beta, d);
  if (std::abs(kc.rho_bar - kc.cbar_dp) > 1e-10 * kc.cbar_dp)
    throw std::runtime_error("rho calibration post-check failed");
  return kc;
}

double gamma_kernel(const Point& x, const Point& y, int d, double beta, double p,
                    const LocalizationRule& rule, const Horizon& horizon) {
  const double e = eta(rule, horizon, x);
  const double r = norm(y - x);
  if (!(r < e)) return 0;
  if (r == 0 && beta > 0) return std::numeric_limits<double>::infinity();
  const double C = normalization_constant(d, beta, p);
  return C * std::pow(r, -beta) * std::pow(e, -(d + p - beta));
}

Point monotone_map(const Point& a, double p, double rho_bar_pb, int d) {
  const Nonlinearity phi{p, 1, 1};
  const SphereRule sph = sphere_rule(d, 128);
  Point out{0, 0};
  for (int i = 0; i < sph.size(); ++i) {
    const double f = phi.dphi(dot(a, sph.omega[i])) * sph.w[i];
    out = out + f * sph.omega[i];
  }
  return (rho_bar_pb / sphere_measure(d)) * out;
}

double boundary_flux(int N, const Point& a, const Point& theta, double delta, double qprime0,
                     double beta, double p, const RadialProfile& rho, int d) {
  if (N > 1) {
    const double rho_bar = rho_moment(rho, p - beta, d);
    return dot(monotone_map(a, p, rho_bar, d), theta);
  }
  const double s = delta * qprime0;
  if (!(s < 1.0 / 3.0))
    throw std::invalid_argument("boundary flux: delta*q'(0) >= 1/3 hits the log singularity");
  const Nonlinearity phi{p, 1, 1};
  const BallRule ball = ball_rule(d, p - beta, 32, 128, rho.knots());
  double total = 0;
  for (int i = 0; i < ball.size(); ++i) {
    const Point& z = ball.z[i];
    const double r = norm(z);
    const double c = dot(theta, z);
    // ln((1+s c)/(1-s c)) / (2 s r) = atanh(s c)/(s r), analytic in r
    const double logfac = std::atanh(s * c) / (s * r);
    total += ball.w[i] * logfac * rho(r) * phi.dphi(dot(a, z) / r);
  }
  return total;
}

double boundary_flux_half(int sign, int N, const Point& a, const Point& theta, double delta,
                          double qprime0, double beta, double p, const RadialProfile& rho, int d) {
  if (N > 1) return 0.5 * boundary_flux(N, a, theta, delta, qprime0, beta, p, rho, d);
  const double s = delta * qprime0;
  if (!(s < 1.0 / 3.0))
    throw std::invalid_argument("boundary flux: delta*q'(0) >= 1/3 hits the log singularity");
  const Nonlinearity phi{p, 1, 1};
  const Rule1D rad = radial_rule(p - beta + d - 1, rho.knots(), 32);
  const SphereRule hemi = hemisphere_rule(d, theta, 96);
  double total = 0;
  for (int i = 0; i < rad.size(); ++i) {
    const double r = rad.x[i];
    for (int j = 0; j < hemi.size(); ++j) {
      const Point z = r * hemi.omega[j];
      const double c = dot(theta, z);
      if (!(c > 0)) continue;
      const double logfac = sign > 0 ? std::log1p(s * c) / (s * r) : -std::log1p(-s * c) / (s * r);
      total += rad.w[i] * hemi.w[j] * logfac * rho(r) * phi.dphi(dot(a, z) / r);
    }
  }
  return total;
}

double a_delta_constant(int N, double delta, double beta, const RadialProfile& rho,
                        double qprime0, int d) {
  if (N > 1) return rho_moment(rho, 2 - beta, d) / cbar(d, 2);
  const Point ed = d == 1 ? Point{1, 0} : Point{0, 1};
  return boundary_flux(1, ed, ed, delta, qprime0, beta, 2, rho, d);
}

double weighted_mollifier(const RadialProfile& psi, const LocalizationRule& rule,
                          const Horizon& horizon, double alpha, const Point& x, const Point& y) {
  const int d = rule.lambda.dim;
  if (!(alpha < d)) throw std::invalid_argument("weighted mollifier requires alpha < d");
  const double e = eta(rule, horizon, x);
  if (!(e > 0)) return 0;
  const double t = norm(y - x) / e;
  if (t >= psi.support) return 0;
  if (t == 0) {
    if (alpha > 0) return std::numeric_limits<double>::infinity();
    if (alpha < 0) return 0;
    return psi(0.0) * std::pow(e, -d);
  }
  return std::pow(e, -d) * psi(t) * std::pow(t, -alpha);
}

double weighted_mollifier_hat(const RadialProfile& psi, const LocalizationRule& rule,
                              const Horizon& horizon, double alpha, const Point& x, const Point& y) {
  return weighted_mollifier(psi, rule, horizon, alpha, x, y) +
         weighted_mollifier(psi, rule, horizon, alpha, y, x);
}

} // namespace nlbvp
