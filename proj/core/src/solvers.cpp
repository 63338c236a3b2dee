#include "nlbvp/solvers.hpp"

#include "nlbvp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nlbvp {

namespace {

constexpr double kEtaFloor = 1e-13;

double lprime(double t, double m) { return t == 0 ? 0.0 : std::pow(std::abs(t), m - 2) * t; }
double lvalue(double t, double m) { return std::pow(std::abs(t), m) / m; }

// One kernel-quadrature pair (x, y) of the double integral, with P1 data.
struct TraceEntry {
  int cx = -1, cy = -1;
  std::array<double, 3> bx{}, by{};
  double weight = 0;   // w_outer * W_ball * rho(|z|)
  double inv_dist = 0; // 1 / (eta(x) |z|)
};

struct AssemblyTrace {
  const Mesh* mesh = nullptr;
  OmegaRule quad;
  std::vector<TraceEntry> entries;
};

AssemblyTrace build_trace(const FormContext& ctx, const Mesh& mesh) {
  AssemblyTrace tr;
  tr.mesh = &mesh;
  tr.quad = omega_rule(mesh, 3);
  const int nq = tr.quad.size();
  const int nb = ctx.ball_rho.size();
  tr.entries.assign(static_cast<size_t>(nq) * nb, {});
  parallel_for(nq, [&](int iq) {
    const Point x = tr.quad.x[iq];
    const double e = eta(ctx.rule, ctx.horizon, x);
    if (e <= kEtaFloor) return;
    const int cx = tr.quad.cell[iq];
    const auto bx = mesh.barycentric(cx, x);
    for (int k = 0; k < nb; ++k) {
      const Point& z = ctx.ball_rho.z[k];
      const double r = norm(z);
      const double rho_r = ctx.rho(r);
      if (rho_r == 0) continue;
      const Point y = x + e * z;
      const int cy = mesh.locate(y);
      if (cy < 0) continue; // roundoff sliver at the boundary
      TraceEntry& t = tr.entries[static_cast<size_t>(iq) * nb + k];
      t.cx = cx;
      t.cy = cy;
      t.bx = bx;
      t.by = mesh.barycentric(cy, y);
      t.weight = tr.quad.w[iq] * ctx.ball_rho.w[k] * rho_r;
      t.inv_dist = 1.0 / (e * r);
    }
  });
  return tr;
}

// Nodes touched by one entry with their (phi_a(x) - phi_a(y)) values.
struct Gather {
  int n = 0;
  int node[6];
  double d[6];
  void add(int id, double v) {
    for (int i = 0; i < n; ++i)
      if (node[i] == id) {
        d[i] += v;
        return;
      }
    node[n] = id;
    d[n] = v;
    ++n;
  }
};

Gather gather(const Mesh& mesh, const TraceEntry& t) {
  Gather g;
  const int npc = mesh.nodes_per_cell();
  for (int j = 0; j < npc; ++j) g.add(mesh.cells[t.cx][j], t.bx[j]);
  for (int j = 0; j < npc; ++j) g.add(mesh.cells[t.cy][j], -t.by[j]);
  return g;
}

double p1_value(const Mesh& mesh, const Eigen::VectorXd& u, int c, const std::array<double, 3>& b) {
  double v = 0;
  for (int j = 0; j < mesh.nodes_per_cell(); ++j) v += b[j] * u[mesh.cells[c][j]];
  return v;
}

// quadrature weights of int phi_i (lumped mass)
Eigen::VectorXd p1_integrals(const Mesh& mesh, const OmegaRule& quad) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (int q = 0; q < quad.size(); ++q) {
    const auto b = mesh.barycentric(quad.cell[q], quad.x[q]);
    for (int j = 0; j < mesh.nodes_per_cell(); ++j) w[mesh.cells[quad.cell[q]][j]] += quad.w[q] * b[j];
  }
  return w;
}

std::vector<int> boundary_nodes(const Mesh& mesh) {
  std::vector<int> out;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    if (mesh.node_on_boundary[i]) out.push_back(i);
  return out;
}

// K_delta phi_i at the outer quadrature points (rows: quad points).
Eigen::MatrixXd k_delta_matrix(const ProblemSpec& spec, const OmegaRule& quad,
                               const ConvolutionContext& mctx) {
  const Mesh& mesh = *spec.mesh;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(quad.size(), mesh.n_nodes());
  parallel_for(quad.size(), [&](int q) {
    const Point x = quad.x[q];
    const double e = eta(mctx.rule, mctx.horizon, x);
    if (e <= kEtaFloor) {
      const auto b = mesh.barycentric(quad.cell[q], x);
      for (int j = 0; j < mesh.nodes_per_cell(); ++j) K(q, mesh.cells[quad.cell[q]][j]) += b[j];
      return;
    }
    for (int k = 0; k < mctx.ball.size(); ++k) {
      const double w = mctx.ball.w[k] * mctx.psi(norm(mctx.ball.z[k]));
      if (w == 0) continue;
      const Point y = x + e * mctx.ball.z[k];
      const int cy = mesh.locate(y);
      if (cy < 0) continue;
      const auto b = mesh.barycentric(cy, y);
      for (int j = 0; j < mesh.nodes_per_cell(); ++j) K(q, mesh.cells[cy][j]) += w * b[j];
    }
  });
  return K;
}

struct SemilinearWork {
  OmegaRule quad;
  Eigen::MatrixXd K; ///< K_delta phi_i at quad points
};

SemilinearWork make_semilinear(const ProblemSpec& spec, const ConvolutionContext& mctx) {
  SemilinearWork w;
  w.quad = omega_rule(*spec.mesh, 3);
  w.K = k_delta_matrix(spec, w.quad, mctx);
  return w;
}

Eigen::VectorXd semilinear_vector(const SemilinearWork& work, const Eigen::VectorXd& u,
                                  double mu, double m) {
  const Eigen::VectorXd ku = work.K * u;
  Eigen::VectorXd g(ku.size());
  for (int q = 0; q < g.size(); ++q) g[q] = work.quad.w[q] * lprime(ku[q], m);
  return mu * (work.K.transpose() * g);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void fill_norms(SolveReport& rep, const ProblemSpec& spec) {
  const Field u = Field::p1(spec.mesh, rep.solution);
  FormContext ctx = spec.ctx;
  ctx.omega = omega_rule(*spec.mesh, 3);
  rep.l2 = l2_norm(u, ctx.omega);
  rep.h1 = h1_norm(u, ctx.omega);
  rep.energy_value = energy(u, ctx);
  rep.seminorm_value = seminorm(u, ctx);
}

void fill_flux(SolveReport& rep, const ProblemSpec& spec, const Eigen::MatrixXd& A,
               const Eigen::VectorXd& N, const Eigen::VectorXd& F) {
  const Eigen::VectorXd res = A * rep.solution + N - F;
  for (int b : boundary_nodes(*spec.mesh)) rep.flux.emplace_back(b, res[b]);
}

} // namespace

ConvolutionContext ProblemSpec::make_mollify_context() const {
  LocalizationRule r = ctx.rule;
  if (mollifier_lambda_smoothed)
    r.lambda = smoothed_distance(ctx.domain, mollifier_lambda_eps,
                                 bump_profile(), ctx.rule.kind);
  return make_convolution(mollifier, r, ctx.horizon.delta);
}

Eigen::MatrixXd assemble_stiffness(const FormContext& ctx, const Mesh& mesh) {
  if (ctx.p != 2) throw std::invalid_argument("stiffness assembly is the p = 2 path");
  if (!(ctx.horizon.delta < ctx.horizon.delta_max))
    throw std::invalid_argument("horizon delta exceeds the admissible threshold");
  const AssemblyTrace tr = build_trace(ctx, mesh);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(mesh.n_nodes(), mesh.n_nodes());
  for (const TraceEntry& t : tr.entries) {
    if (t.cx < 0) continue;
    const Gather g = gather(mesh, t);
    const double w = t.weight * t.inv_dist * t.inv_dist;
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b) A(g.node[a], g.node[b]) += w * g.d[a] * g.d[b];
  }
  return A;
}

Eigen::VectorXd assemble_load(const ProblemSpec& spec) {
  const Mesh& mesh = *spec.mesh;
  const OmegaRule quad = omega_rule(mesh, 3);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(mesh.n_nodes());
  Field fd = spec.f;
  if (spec.mollify_f) {
    const ConvolutionContext mctx = spec.make_mollify_context();
    fd = spec.f_is_dual ? mollify_data(spec.f_dual, mctx) : mollify_data(spec.f, mctx);
  } else if (spec.f_is_dual) {
    // unmollified dual datum: <f, v> = int f0 v + int f1 . grad v
    std::vector<double> f0v(quad.size());
    parallel_for(quad.size(), [&](int q) { f0v[q] = spec.f_dual.f0(quad.x[q]); });
    for (int q = 0; q < quad.size(); ++q) {
      const auto b = mesh.barycentric(quad.cell[q], quad.x[q]);
      for (int j = 0; j < mesh.nodes_per_cell(); ++j)
        F[mesh.cells[quad.cell[q]][j]] += quad.w[q] * b[j] * f0v[q];
    }
    for (int q = 0; q < quad.size(); ++q) {
      const Point f1 = spec.f_dual.f1(quad.x[q]);
      const int c = quad.cell[q];
      for (int j = 0; j < mesh.nodes_per_cell(); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(mesh.n_nodes());
        e[mesh.cells[c][j]] = 1;
        const Field phi = Field::p1(spec.mesh, e);
        F[mesh.cells[c][j]] += quad.w[q] * dot(f1, phi.grad(quad.x[q]));
      }
    }
    return F;
  }
  std::vector<double> fv(quad.size());
  parallel_for(quad.size(), [&](int q) { fv[q] = fd(quad.x[q]); });
  for (int q = 0; q < quad.size(); ++q) {
    const auto b = mesh.barycentric(quad.cell[q], quad.x[q]);
    for (int j = 0; j < mesh.nodes_per_cell(); ++j)
      F[mesh.cells[quad.cell[q]][j]] += quad.w[q] * b[j] * fv[q];
  }
  return F;
}

Eigen::VectorXd boundary_load(const Mesh& mesh, const Field& g) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(mesh.n_nodes());
  for (const Facet& f : mesh.facets) {
    if (mesh.dim == 1) {
      F[f.n[0]] += f.measure * g(mesh.nodes[f.n[0]]);
    } else {
      const Rule1D gl = gauss_legendre_on(0, 1, 2);
      const Point a = mesh.nodes[f.n[0]], b = mesh.nodes[f.n[1]];
      for (int i = 0; i < gl.size(); ++i) {
        const Point x = a + gl.x[i] * (b - a);
        const double w = gl.w[i] * f.measure;
        F[f.n[0]] += w * (1 - gl.x[i]) * g(x);
        F[f.n[1]] += w * gl.x[i] * g(x);
      }
    }
  }
  return F;
}

Eigen::MatrixXd boundary_mass(const Mesh& mesh) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(mesh.n_nodes(), mesh.n_nodes());
  for (const Facet& f : mesh.facets) {
    if (mesh.dim == 1) {
      M(f.n[0], f.n[0]) += f.measure;
    } else {
      const double m = f.measure / 6.0;
      M(f.n[0], f.n[0]) += 2 * m;
      M(f.n[1], f.n[1]) += 2 * m;
      M(f.n[0], f.n[1]) += m;
      M(f.n[1], f.n[0]) += m;
    }
  }
  return M;
}

PcgResult pcg(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int maxit) {
  const Eigen::VectorXd dinv = A.diagonal().cwiseMax(1e-300).cwiseInverse();
  Eigen::VectorXd r = b - A * x;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double bnorm = std::max(b.norm(), 1e-300);
  PcgResult res;
  res.relative_residual = r.norm() / bnorm;
  for (int it = 0; it < maxit && res.relative_residual > tol; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    res.iterations = it + 1;
    res.relative_residual = r.norm() / bnorm;
  }
  return res;
}

namespace {

// Shared linear path for Dirichlet/Robin with optional Picard iteration on
// the semilinear term.
SolveReport solve_linear_bc(const ProblemSpec& spec, const Eigen::MatrixXd& A_in,
                            const Eigen::VectorXd& F_in, bool dirichlet) {
  const Mesh& mesh = *spec.mesh;
  const int n = mesh.n_nodes();
  Eigen::MatrixXd A = A_in;
  Eigen::VectorXd F = F_in;

  SolveReport rep;
  std::unique_ptr<SemilinearWork> sw;
  ConvolutionContext mctx;
  if (spec.mu > 0) {
    mctx = spec.make_mollify_context();
    sw = std::make_unique<SemilinearWork>(make_semilinear(spec, mctx));
    if (spec.m == 2) {
      // exact linear operator mu K^T W K
      Eigen::MatrixXd KWK = sw->K.transpose() *
                            sw->quad.w.size() * 0; // placeholder replaced below
      (void)KWK;
      Eigen::VectorXd wq(sw->quad.size());
      for (int q = 0; q < sw->quad.size(); ++q) wq[q] = sw->quad.w[q];
      A += spec.mu * (sw->K.transpose() * wq.asDiagonal() * sw->K);
      sw.reset(); // folded into A; no Picard needed
      rep.picard_iterations = 1;
    }
  }

  std::vector<int> bnodes = boundary_nodes(mesh);
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (dirichlet) {
    for (int b : bnodes) {
      fixed[b] = 1;
      u[b] = spec.g(mesh.nodes[b]);
    }
  }
  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) free.push_back(i);
  const int nf = static_cast<int>(free.size());
  Eigen::MatrixXd Aff(nf, nf);
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < nf; ++b) Aff(a, b) = A(free[a], free[b]);

  auto reduced_rhs = [&](const Eigen::VectorXd& nl) {
    Eigen::VectorXd rhs(nf);
    for (int a = 0; a < nf; ++a) {
      double s = F[free[a]] - nl[free[a]];
      if (dirichlet)
        for (int b : bnodes) s -= A(free[a], b) * u[b];
      rhs[a] = s;
    }
    return rhs;
  };

  Eigen::VectorXd uf = Eigen::VectorXd::Zero(nf);
  const int max_picard = sw ? spec.picard_maxit : 1;
  const double damping = (sw && spec.m > 2) ? 0.5 : 1.0;
  for (int pic = 0; pic < max_picard; ++pic) {
    Eigen::VectorXd nl = Eigen::VectorXd::Zero(n);
    if (sw) nl = semilinear_vector(*sw, u, spec.mu, spec.m);
    const Eigen::VectorXd rhs = reduced_rhs(nl);
    Eigen::VectorXd x = uf;
    const PcgResult pr = pcg(Aff, rhs, x, spec.solver_tol, spec.solver_maxit);
    rep.iterations = pr.iterations;
    rep.residual = pr.relative_residual;
    if (pr.relative_residual > 100 * std::max(spec.solver_tol, 1e-14) && pr.iterations >= spec.solver_maxit)
      throw std::runtime_error("linear solver failed to converge (non-SPD reduced system?)");
    const Eigen::VectorXd uf_new = damping * x + (1 - damping) * uf;
    const double upd = (uf_new - uf).norm() / std::max(uf_new.norm(), 1e-30);
    uf = uf_new;
    for (int a = 0; a < nf; ++a) u[free[a]] = uf[a];
    rep.picard_iterations = pic + 1;
    if (!sw) break;
    if (upd <= spec.picard_tol) break;
    if (pic + 1 == max_picard)
      throw std::runtime_error("Picard iteration did not converge within the limit");
  }
  rep.solution = u;

  Eigen::VectorXd nl = Eigen::VectorXd::Zero(n);
  if (spec.mu > 0 && spec.m != 2) {
    ConvolutionContext m2 = spec.make_mollify_context();
    SemilinearWork w2 = make_semilinear(spec, m2);
    nl = semilinear_vector(w2, u, spec.mu, spec.m);
  } else if (spec.mu > 0 && spec.m == 2) {
    nl = Eigen::VectorXd::Zero(n); // already folded into A
  }
  fill_flux(rep, spec, A, nl, F);
  fill_norms(rep, spec);
  return rep;
}

} // namespace

SolveReport solve_dirichlet(const ProblemSpec& spec) {
  Timer timer;
  if (spec.ctx.p > 2) {
    SolveReport rep = minimize_energy(spec);
    rep.wall_seconds = timer.seconds();
    return rep;
  }
  const Eigen::MatrixXd A = assemble_stiffness(spec.ctx, *spec.mesh);
  const Eigen::VectorXd F = assemble_load(spec);
  SolveReport rep = solve_linear_bc(spec, A, F, /*dirichlet=*/true);
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport solve_neumann(const ProblemSpec& spec) {
  Timer timer;
  const Mesh& mesh = *spec.mesh;
  const int n = mesh.n_nodes();
  const Eigen::MatrixXd A = assemble_stiffness(spec.ctx, mesh);
  Eigen::VectorXd F = assemble_load(spec) + boundary_load(mesh, spec.g);

  // compatibility <f,1> + <g,1> = 0
  const OmegaRule quad = omega_rule(mesh, 3);
  const Eigen::VectorXd w = p1_integrals(mesh, quad);
  const double defect = F.sum();
  double scale = 0;
  for (int q = 0; q < quad.size(); ++q) scale += quad.w[q];
  const double fnorm = F.lpNorm<1>() + 1e-30;
  if (std::abs(defect) > 1e-6 * fnorm)
    throw std::invalid_argument("Neumann data violate the compatibility condition: defect = " +
                                std::to_string(defect));
  (void)scale;

  // one Lagrange multiplier row enforcing the zero integral average
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = A;
  B.topRightCorner(n, 1) = w;
  B.bottomLeftCorner(1, n) = w.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = F;
  const Eigen::VectorXd sol = B.ldlt().solve(rhs);
  SolveReport rep;
  rep.solution = sol.head(n);
  const double mean = w.dot(rep.solution) / spec.ctx.domain.measure();
  if (std::abs(mean) > 1e-10)
    throw std::runtime_error("Neumann solution mean constraint violated");
  rep.iterations = 1;
  rep.residual = (A * rep.solution + sol[n] * w - F).norm() / std::max(F.norm(), 1e-30);
  fill_flux(rep, spec, A, Eigen::VectorXd::Zero(n), F);
  fill_norms(rep, spec);
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport solve_robin(const ProblemSpec& spec) {
  Timer timer;
  if (!(spec.mu > 0 || spec.robin_b > 0))
    throw std::invalid_argument("Robin problem needs mu > 0 or b >= b0 > 0 for coercivity");
  if (spec.ctx.p > 2) {
    SolveReport rep = minimize_energy(spec);
    rep.wall_seconds = timer.seconds();
    return rep;
  }
  const Mesh& mesh = *spec.mesh;
  Eigen::MatrixXd A = assemble_stiffness(spec.ctx, mesh);
  A += spec.robin_b * boundary_mass(mesh);
  const Eigen::VectorXd F = assemble_load(spec) + boundary_load(mesh, spec.g);
  SolveReport rep = solve_linear_bc(spec, A, F, /*dirichlet=*/false);
  rep.wall_seconds = timer.seconds();
  return rep;
}

namespace {

Eigen::MatrixXd local_stiffness(const ProblemSpec& spec) {
  const Mesh& mesh = *spec.mesh;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(mesh.n_nodes(), mesh.n_nodes());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.dim == 1) {
      const int i = mesh.cells[c][0], j = mesh.cells[c][1];
      const double k = 1.0 / std::abs(mesh.nodes[j][0] - mesh.nodes[i][0]);
      A(i, i) += k;
      A(j, j) += k;
      A(i, j) -= k;
      A(j, i) -= k;
    } else {
      const Point a = mesh.nodes[mesh.cells[c][0]], b = mesh.nodes[mesh.cells[c][1]],
                  d = mesh.nodes[mesh.cells[c][2]];
      const double det = (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
      const Point g1{(d[1] - a[1]) / det, -(d[0] - a[0]) / det};
      const Point g2{-(b[1] - a[1]) / det, (b[0] - a[0]) / det};
      const Point g0{-g1[0] - g2[0], -g1[1] - g2[1]};
      const Point g[3] = {g0, g1, g2};
      const double area = mesh.cell_measure(c);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) A(mesh.cells[c][p], mesh.cells[c][q]) += area * dot(g[p], g[q]);
    }
  }
  return A;
}

} // namespace

SolveReport solve_local(const ProblemSpec& spec) {
  Timer timer;
  if (spec.ctx.p != 2)
    throw std::invalid_argument("local reference solve supports p = 2; use the descent path for p > 2");
  const Mesh& mesh = *spec.mesh;
  const int n = mesh.n_nodes();
  Eigen::MatrixXd A = local_stiffness(spec);

  // local load uses the raw (unmollified) datum
  ProblemSpec raw = spec;
  raw.mollify_f = false;
  Eigen::VectorXd F = assemble_load(raw);

  SolveReport rep;
  if (spec.bc == BcKind::Dirichlet) {
    if (spec.mu > 0) {
      // local semilinear: mu int l'(u) v; Picard with the mass matrix for m=2
      const OmegaRule quad = omega_rule(mesh, 3);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
      for (int b : boundary_nodes(mesh)) u[b] = spec.g(mesh.nodes[b]);
      for (int pic = 0; pic < spec.picard_maxit; ++pic) {
        Eigen::VectorXd nl = Eigen::VectorXd::Zero(n);
        for (int q = 0; q < quad.size(); ++q) {
          const auto b = mesh.barycentric(quad.cell[q], quad.x[q]);
          double uv = 0;
          for (int j = 0; j < mesh.nodes_per_cell(); ++j) uv += b[j] * u[mesh.cells[quad.cell[q]][j]];
          const double lw = spec.mu * quad.w[q] * lprime(uv, spec.m);
          for (int j = 0; j < mesh.nodes_per_cell(); ++j)
            nl[mesh.cells[quad.cell[q]][j]] += lw * b[j];
        }
        ProblemSpec sub = spec;
        sub.mu = 0;
        SolveReport r2 = solve_linear_bc(sub, A, F - nl, true);
        const double upd = (r2.solution - u).norm() / std::max(r2.solution.norm(), 1e-30);
        u = r2.solution;
        rep = r2;
        rep.picard_iterations = pic + 1;
        if (upd < spec.picard_tol) break;
      }
      rep.solution = u;
    } else {
      rep = solve_linear_bc(spec, A, F, true);
    }
  } else if (spec.bc == BcKind::Neumann) {
    F += boundary_load(mesh, spec.g);
    const OmegaRule quad = omega_rule(mesh, 3);
    const Eigen::VectorXd w = p1_integrals(mesh, quad);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) = A;
    B.topRightCorner(n, 1) = w;
    B.bottomLeftCorner(1, n) = w.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = F;
    const Eigen::VectorXd sol = B.ldlt().solve(rhs);
    rep.solution = sol.head(n);
    rep.iterations = 1;
    rep.residual = (A * rep.solution + sol[n] * w - F).norm() / std::max(F.norm(), 1e-30);
  } else {
    if (!(spec.mu > 0 || spec.robin_b > 0))
      throw std::invalid_argument("Robin problem needs mu > 0 or b >= b0 > 0 for coercivity");
    A += spec.robin_b * boundary_mass(mesh);
    F += boundary_load(mesh, spec.g);
    rep = solve_linear_bc(spec, A, F, false);
  }
  // norms against the local context
  const Field u = Field::p1(spec.mesh, rep.solution);
  const OmegaRule quad = omega_rule(mesh, 3);
  rep.l2 = l2_norm(u, quad);
  rep.h1 = h1_norm(u, quad);
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport minimize_energy(const ProblemSpec& spec) {
  Timer timer;
  if (!(spec.ctx.p >= 2)) throw std::invalid_argument("energy descent requires p >= 2");
  if (spec.bc == BcKind::Neumann)
    throw std::invalid_argument("energy descent covers the Dirichlet and Robin variants");
  const Mesh& mesh = *spec.mesh;
  const FormContext& ctx = spec.ctx;
  const int n = mesh.n_nodes();
  const AssemblyTrace tr = build_trace(ctx, mesh);
  const Eigen::VectorXd F = assemble_load(spec) +
                            (spec.bc == BcKind::Robin ? boundary_load(mesh, spec.g)
                                                      : Eigen::VectorXd::Zero(n).eval());

  std::unique_ptr<SemilinearWork> sw;
  if (spec.mu > 0) {
    ConvolutionContext mctx = spec.make_mollify_context();
    sw = std::make_unique<SemilinearWork>(make_semilinear(spec, mctx));
  }

  const auto bnodes = boundary_nodes(mesh);
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (spec.bc == BcKind::Dirichlet) {
    for (int b : bnodes) {
      fixed[b] = 1;
      u[b] = spec.g(mesh.nodes[b]);
    }
  }

  const Nonlinearity& phi = ctx.phi;
  auto objective = [&](const Eigen::VectorXd& v) {
    double E = 0;
    for (const TraceEntry& t : tr.entries) {
      if (t.cx < 0) continue;
      const double du = (p1_value(mesh, v, t.cx, t.bx) - p1_value(mesh, v, t.cy, t.by)) * t.inv_dist;
      E += t.weight * phi.phi(du);
    }
    if (spec.bc == BcKind::Robin)
      for (const Facet& f : mesh.facets)
        E += spec.robin_b * f.measure * phi.phi(v[f.n[0]]) * (mesh.dim == 1 ? 1.0 : 0.5) +
             (mesh.dim == 2 ? spec.robin_b * f.measure * 0.5 * phi.phi(v[f.n[1]]) : 0.0);
    if (sw) {
      const Eigen::VectorXd ku = sw->K * v;
      for (int q = 0; q < sw->quad.size(); ++q)
        E += spec.mu * sw->quad.w[q] * lvalue(ku[q], spec.m);
    }
    return E - F.dot(v);
  };
  auto gradient = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd g = -F;
    for (const TraceEntry& t : tr.entries) {
      if (t.cx < 0) continue;
      const double du = (p1_value(mesh, v, t.cx, t.bx) - p1_value(mesh, v, t.cy, t.by)) * t.inv_dist;
      const double s = t.weight * phi.dphi(du) * t.inv_dist;
      const Gather ga = gather(mesh, t);
      for (int a = 0; a < ga.n; ++a) g[ga.node[a]] += s * ga.d[a];
    }
    if (spec.bc == BcKind::Robin)
      for (const Facet& f : mesh.facets) {
        if (mesh.dim == 1) {
          g[f.n[0]] += spec.robin_b * f.measure * phi.dphi(v[f.n[0]]);
        } else {
          g[f.n[0]] += spec.robin_b * f.measure * 0.5 * phi.dphi(v[f.n[0]]);
          g[f.n[1]] += spec.robin_b * f.measure * 0.5 * phi.dphi(v[f.n[1]]);
        }
      }
    if (sw) g += semilinear_vector(*sw, v, spec.mu, spec.m);
    return g;
  };

  // diagonal metric from the local p=2 stiffness
  Eigen::VectorXd metric = local_stiffness(spec).diagonal();
  for (int i = 0; i < n; ++i) metric[i] = std::max(metric[i], 1e-12);

  SolveReport rep;
  double J = objective(u);
  double step = 1.0;
  int it = 0;
  for (; it < spec.descent_maxit; ++it) {
    Eigen::VectorXd g = gradient(u);
    for (int b : bnodes)
      if (fixed[b]) g[b] = 0;
    const double gmax = g.lpNorm<Eigen::Infinity>();
    if (gmax <= spec.descent_tol) break;
    Eigen::VectorXd dir = -g.cwiseQuotient(metric);
    const double slope = g.dot(dir);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = u + step * dir;
      const double Jc = objective(cand);
      if (Jc <= J + 1e-4 * step * slope) {
        if (!(Jc < J))
          break; // no strict decrease left at this scale
        u = cand;
        J = Jc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (step < 1e-18)
        throw std::runtime_error("energy descent line search stagnated (step underflow)");
      step *= 0.5;
      if (step < 1e-18) break;
      continue;
    }
    step = std::min(step * 1.5, 1e6);
  }
  rep.descent_iterations = it;
  rep.solution = u;
  {
    Eigen::VectorXd g = gradient(u);
    for (int b : bnodes)
      if (fixed[b]) g[b] = 0;
    rep.residual = g.lpNorm<Eigen::Infinity>();
  }
  rep.iterations = it;
  fill_norms(rep, spec);
  rep.wall_seconds = timer.seconds();
  return rep;
}

Eigen::VectorXd semilinear_apply(const Eigen::VectorXd& u, const ProblemSpec& spec,
                                 Eigen::MatrixXd* picard_matrix) {
  if (spec.m <= 1) throw std::invalid_argument("lower-order exponent m must exceed 1");
  const double pstar = spec.ctx.p < spec.ctx.d
                           ? spec.ctx.d * spec.ctx.p / (spec.ctx.d - spec.ctx.p)
                           : std::numeric_limits<double>::infinity();
  if (!(spec.m < pstar)) throw std::invalid_argument("lower-order exponent m must stay below p*");
  const ConvolutionContext mctx = spec.make_mollify_context();
  const SemilinearWork w = make_semilinear(spec, mctx);
  if (picard_matrix && spec.m == 2) {
    Eigen::VectorXd wq(w.quad.size());
    for (int q = 0; q < w.quad.size(); ++q) wq[q] = w.quad.w[q];
    *picard_matrix = spec.mu * (w.K.transpose() * wq.asDiagonal() * w.K);
  }
  return semilinear_vector(w, u, spec.mu, spec.m);
}

std::vector<double> fixed_point_residual(const Eigen::VectorXd& u, const ProblemSpec& spec,
                                         const std::vector<Point>& samples) {
  const FormContext& ctx = spec.ctx;
  if (ctx.p != 2 || !(ctx.beta < ctx.d))
    throw std::invalid_argument("fixed-point identity needs p = 2 and beta < d");
  const Field uf = Field::p1(spec.mesh, u);
  const ConvolutionContext cctx = make_convolution(spec.mollifier, ctx.rule, ctx.horizon.delta);
  Field fd = spec.f;
  if (spec.mollify_f) {
    const ConvolutionContext mctx = spec.make_mollify_context();
    fd = spec.f_is_dual ? mollify_data(spec.f_dual, mctx) : mollify_data(spec.f, mctx);
  }
  Field lprime_ku = Field::constant(0);
  if (spec.mu > 0) {
    const ConvolutionContext mctx = spec.make_mollify_context();
    const double m = spec.m;
    lprime_ku = Field::closed_form(
        [uf, mctx, m](const Point& x) { return lprime(k_delta(uf, x, mctx), m); });
  }
  std::vector<double> r(samples.size());
  const double mu = spec.mu;
  parallel_for(static_cast<int>(samples.size()), [&](int i) {
    const Point& x = samples[i];
    const auto jp = j_p_operators(uf, x, ctx.beta, ctx.rho, cctx);
    double G = fd(x);
    if (mu > 0) {
      const ConvolutionContext mctx = spec.make_mollify_context();
      G -= mu * k_delta_star(lprime_ku, x, mctx);
    }
    r[i] = uf(x) - jp.first - G / jp.second;
  });
  return r;
}

} // namespace nlbvp
