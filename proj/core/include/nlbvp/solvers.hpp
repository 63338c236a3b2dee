#pragma once

#include "nlbvp/convolutions.hpp"
#include "nlbvp/fields.hpp"
#include "nlbvp/operators.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace nlbvp {

enum class BcKind { Dirichlet, Neumann, Robin };

/// One boundary-value problem: form context, mesh, boundary condition,
/// Poisson datum, and the semilinear configuration.
struct ProblemSpec {
  FormContext ctx;
  std::shared_ptr<const Mesh> mesh;
  BcKind bc = BcKind::Dirichlet;

  Field g = Field::constant(0); ///< boundary datum
  double robin_b = 0;           ///< constant b0 (Robin)

  Field f = Field::constant(0);
  bool f_is_dual = false;
  DualDatum f_dual;
  bool mollify_f = true; ///< apply K*_delta to the Poisson datum

  double mu = 0;  ///< semilinear weight
  double m = 2;   ///< lower-order exponent in (1, p*)
  RadialProfile mollifier = normalized_mollifier(1);
  bool mollifier_lambda_smoothed = false; ///< use a smoothed lambda for K_delta
  double mollifier_lambda_eps = 0.05;

  double solver_tol = 1e-10;
  int solver_maxit = 20000;
  double picard_tol = 1e-8;
  int picard_maxit = 200;
  double descent_tol = 1e-6;
  int descent_maxit = 100000;

  /// The convolution context used by the semilinear term and data
  /// mollification.
  ConvolutionContext make_mollify_context() const;
};

struct SolveReport {
  Eigen::VectorXd solution;
  int iterations = 0;
  double residual = 0;
  int picard_iterations = 0;
  int descent_iterations = 0;
  double energy_value = 0, seminorm_value = 0, l2 = 0, h1 = 0;
  std::vector<std::pair<int, double>> flux; ///< boundary node -> <Z, phi_b>
  double wall_seconds = 0;

  Field field(std::shared_ptr<const Mesh> mesh) const { return Field::p1(mesh, solution); }
};

/// Nonlocal P1 stiffness A_ij = B_{2,delta}(phi_j, phi_i); symmetric positive
/// semidefinite with constants in the kernel.
Eigen::MatrixXd assemble_stiffness(const FormContext& ctx, const Mesh& mesh);

/// Load vector <f, phi_i> for a (possibly mollified) datum.
Eigen::VectorXd assemble_load(const ProblemSpec& spec);

/// Boundary pairing <g, T phi_i>.
Eigen::VectorXd boundary_load(const Mesh& mesh, const Field& g);

/// Boundary mass matrix int_boundary phi_a phi_b dsigma.
Eigen::MatrixXd boundary_mass(const Mesh& mesh);

SolveReport solve_dirichlet(const ProblemSpec& spec);
SolveReport solve_neumann(const ProblemSpec& spec);
SolveReport solve_robin(const ProblemSpec& spec);

/// Local (delta = 0) counterpart on the same mesh; the reference for
/// delta-studies.
SolveReport solve_local(const ProblemSpec& spec);

/// Energy-descent solve for p > 2 (Dirichlet or Robin); Armijo backtracking
/// on the discrete energy, Euler-Lagrange residual stopping rule.
SolveReport minimize_energy(const ProblemSpec& spec);

/// Semilinear Galerkin vector N(u)_i = mu int l'(K u) K phi_i; for m = 2 also
/// fills the exact linear Picard matrix mu K^T W K when requested.
Eigen::VectorXd semilinear_apply(const Eigen::VectorXd& u, const ProblemSpec& spec,
                                 Eigen::MatrixXd* picard_matrix = nullptr);

/// Fixed-point residual r(x) = u(x) - J_{delta,beta} u(x) - G(x)/P(x) with
/// G = f_delta - mu K*[l'(K u)], at the given interior samples.
std::vector<double> fixed_point_residual(const Eigen::VectorXd& u, const ProblemSpec& spec,
                                         const std::vector<Point>& samples);

/// Jacobi-preconditioned conjugate gradients (SPD systems).
struct PcgResult {
  int iterations = 0;
  double relative_residual = 0;
};
PcgResult pcg(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int maxit);

} // namespace nlbvp
