#include "nlbvp/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace nlbvp {

Field Field::closed_form(Value v, Grad g, Hess h) {
  Field f;
  f.value_ = std::move(v);
  f.grad_ = std::move(g);
  f.hess_ = std::move(h);
  return f;
}

Field Field::constant(double c) {
  return closed_form([c](const Point&) { return c; }, [](const Point&) { return Point{0, 0}; },
                     [](const Point&) { return std::array<double, 4>{0, 0, 0, 0}; });
}

Field Field::p1(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd nodal) {
  if (nodal.size() != mesh->n_nodes())
    throw std::invalid_argument("p1 field needs one value per mesh node");
  Field f;
  f.mesh_ = std::move(mesh);
  f.nodal_ = std::move(nodal);
  return f;
}

double Field::operator()(const Point& x) const {
  if (!mesh_) return value_(x);
  const int c = mesh_->locate(x);
  if (c < 0) throw std::domain_error("p1 field evaluated outside the mesh");
  const auto l = mesh_->barycentric(c, x);
  double v = 0;
  for (int j = 0; j < mesh_->nodes_per_cell(); ++j) v += l[j] * nodal_[mesh_->cells[c][j]];
  return v;
}

Point Field::grad(const Point& x) const {
  if (!mesh_) {
    if (!grad_) throw std::logic_error("field has no gradient");
    return grad_(x);
  }
  const int c = mesh_->locate(x);
  if (c < 0) throw std::domain_error("p1 field evaluated outside the mesh");
  const auto& cell = mesh_->cells[c];
  if (mesh_->dim == 1) {
    const double x0 = mesh_->nodes[cell[0]][0], x1 = mesh_->nodes[cell[1]][0];
    return {(nodal_[cell[1]] - nodal_[cell[0]]) / (x1 - x0), 0};
  }
  const Point a = mesh_->nodes[cell[0]], b = mesh_->nodes[cell[1]], d = mesh_->nodes[cell[2]];
  const double det = (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
  // grad of barycentric coordinates
  const Point gl1{(d[1] - a[1]) / det, -(d[0] - a[0]) / det};
  const Point gl2{-(b[1] - a[1]) / det, (b[0] - a[0]) / det};
  const Point gl0{-gl1[0] - gl2[0], -gl1[1] - gl2[1]};
  return nodal_[cell[0]] * gl0 + nodal_[cell[1]] * gl1 + nodal_[cell[2]] * gl2;
}

std::array<double, 4> Field::hess(const Point& x) const {
  if (mesh_ || !hess_) throw std::logic_error("field has no Hessian");
  return hess_(x);
}

bool Field::has_grad() const { return mesh_ != nullptr || static_cast<bool>(grad_); }
bool Field::has_hess() const { return !mesh_ && static_cast<bool>(hess_); }

VectorField VectorField::closed_form(Value v) {
  VectorField f;
  f.value_ = std::move(v);
  return f;
}

VectorField VectorField::zero() {
  return closed_form([](const Point&) { return Point{0, 0}; });
}

VectorField VectorField::p1_gradient(const Field& u) {
  if (!u.is_discrete()) throw std::invalid_argument("p1_gradient needs a discrete field");
  return closed_form([u](const Point& x) { return u.grad(x); });
}

Point VectorField::operator()(const Point& x) const { return value_(x); }

double lp_norm(const Field& u, const OmegaRule& rule, double p) {
  double s = 0;
  for (int i = 0; i < rule.size(); ++i) s += rule.w[i] * std::pow(std::abs(u(rule.x[i])), p);
  return std::pow(s, 1.0 / p);
}

double l2_norm(const Field& u, const OmegaRule& rule) { return lp_norm(u, rule, 2.0); }

double l2_distance(const Field& u, const Field& v, const OmegaRule& rule) {
  double s = 0;
  for (int i = 0; i < rule.size(); ++i) {
    const double d = u(rule.x[i]) - v(rule.x[i]);
    s += rule.w[i] * d * d;
  }
  return std::sqrt(s);
}

double linf_distance(const Field& u, const Field& v, const std::vector<Point>& samples) {
  double m = 0;
  for (const auto& x : samples) m = std::max(m, std::abs(u(x) - v(x)));
  return m;
}

double grad_lp_norm(const Field& u, const OmegaRule& rule, double p) {
  double s = 0;
  for (int i = 0; i < rule.size(); ++i) s += rule.w[i] * std::pow(norm(u.grad(rule.x[i])), p);
  return std::pow(s, 1.0 / p);
}

double h1_norm(const Field& u, const OmegaRule& rule) {
  const double a = l2_norm(u, rule), b = grad_lp_norm(u, rule, 2.0);
  return std::sqrt(a * a + b * b);
}

Eigen::VectorXd interpolate(const Field& u, const Mesh& mesh) {
  Eigen::VectorXd v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = u(mesh.nodes[i]);
  return v;
}

} // namespace nlbvp
