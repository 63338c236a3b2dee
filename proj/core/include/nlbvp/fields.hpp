#pragma once

#include "nlbvp/geometry.hpp"
#include "nlbvp/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace nlbvp {

/// A scalar function on the domain: either a closed form (value plus optional
/// gradient/Hessian callables) or a piecewise-linear nodal field on a mesh.
class Field {
public:
  using Value = std::function<double(const Point&)>;
  using Grad = std::function<Point(const Point&)>;
  using Hess = std::function<std::array<double, 4>(const Point&)>; ///< row-major 2x2

  Field() = default;
  static Field closed_form(Value v, Grad g = nullptr, Hess h = nullptr);
  static Field constant(double c);
  static Field p1(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd nodal);

  double operator()(const Point& x) const;
  Point grad(const Point& x) const;
  std::array<double, 4> hess(const Point& x) const;

  bool has_grad() const;
  bool has_hess() const;
  bool is_discrete() const { return mesh_ != nullptr; }
  const Mesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& nodal() const { return nodal_; }

private:
  Value value_;
  Grad grad_;
  Hess hess_;
  std::shared_ptr<const Mesh> mesh_;
  Eigen::VectorXd nodal_;
};

/// Vector-valued counterpart (used for gradients and dual data).
class VectorField {
public:
  using Value = std::function<Point(const Point&)>;

  VectorField() = default;
  static VectorField closed_form(Value v);
  static VectorField zero();
  /// Piecewise-constant gradient of a P1 field.
  static VectorField p1_gradient(const Field& u);

  Point operator()(const Point& x) const;

private:
  Value value_;
};

/// Functional v -> int f0 v + int f1 . grad v, the (f0, f1) representation of
/// dual data.
struct DualDatum {
  Field f0;
  VectorField f1;
};

double lp_norm(const Field& u, const OmegaRule& rule, double p);
double l2_norm(const Field& u, const OmegaRule& rule);
double l2_distance(const Field& u, const Field& v, const OmegaRule& rule);
double linf_distance(const Field& u, const Field& v, const std::vector<Point>& samples);

/// ||grad u||_{L^p} for fields with gradients (P1 or closed-form).
double grad_lp_norm(const Field& u, const OmegaRule& rule, double p);

/// W^{1,2} norm sqrt(||u||^2 + ||grad u||^2).
double h1_norm(const Field& u, const OmegaRule& rule);

/// Nodal interpolant of a closed-form field.
Eigen::VectorXd interpolate(const Field& u, const Mesh& mesh);

} // namespace nlbvp
