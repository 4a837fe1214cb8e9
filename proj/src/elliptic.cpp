#include "hypokin/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hypokin {

namespace {

using Triplet = Eigen::Triplet<double>;

// Gradients of the three barycentric hats on triangle c.
std::array<Vec2, 3> hat_gradients(const Mesh& mesh, int c) {
  const auto& t = mesh.triangles[c];
  const Vec2& p0 = mesh.vertices[t[0]];
  const Vec2& p1 = mesh.vertices[t[1]];
  const Vec2& p2 = mesh.vertices[t[2]];
  const double inv2a = 1.0 / (2.0 * mesh.cell_areas[c]);
  return {Vec2((p1.y() - p2.y()) * inv2a, (p2.x() - p1.x()) * inv2a),
          Vec2((p2.y() - p0.y()) * inv2a, (p0.x() - p2.x()) * inv2a),
          Vec2((p0.y() - p1.y()) * inv2a, (p1.x() - p0.x()) * inv2a)};
}

double robin_weight(double alpha) { return alpha / (2.0 - alpha); }

}  // namespace

SpMat assemble_stiffness(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto g = hat_gradients(mesh, c);
    const auto& t = mesh.triangles[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(t[i], t[j], mesh.cell_areas[c] * g[i].dot(g[j]));
  }
  SpMat A(mesh.n_vertices(), mesh.n_vertices());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SpMat assemble_mass(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    const double a12 = mesh.cell_areas[c] / 12.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], a12 * (i == j ? 2.0 : 1.0));
  }
  SpMat M(mesh.n_vertices(), mesh.n_vertices());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SpMat assemble_boundary_mass(const Mesh& mesh, const std::vector<double>& alpha_edge) {
  std::vector<Triplet> trip;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    double c = robin_weight(alpha_edge[e]) * be.length / 4.0;
    if (c == 0.0) continue;
    int v[2] = {be.v0, be.v1};
    for (int i : v)
      for (int j : v) trip.emplace_back(i, j, c);
  }
  SpMat B(mesh.n_vertices(), mesh.n_vertices());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

Eigen::VectorXd lumped_load(const Mesh& mesh) {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int i = 0; i < 3; ++i) l(mesh.triangles[c][i]) += mesh.cell_areas[c] / 3.0;
  return l;
}

Eigen::VectorXd rhs_from_cellwise(const Mesh& mesh, const Eigen::VectorXd& cell_values) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double v = mesh.cell_areas[c] / 3.0 * cell_values(c);
    for (int i = 0; i < 3; ++i) b(mesh.triangles[c][i]) += v;
  }
  return b;
}

Eigen::VectorXd rhs_from_function(const Mesh& mesh, const std::function<double(Vec2)>& f) {
  // Edge-midpoint rule, exact for quadratics.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    const Vec2& p0 = mesh.vertices[t[0]];
    const Vec2& p1 = mesh.vertices[t[1]];
    const Vec2& p2 = mesh.vertices[t[2]];
    const double a3 = mesh.cell_areas[c] / 3.0;
    Vec2 m01 = 0.5 * (p0 + p1), m12 = 0.5 * (p1 + p2), m20 = 0.5 * (p2 + p0);
    double f01 = f(m01), f12 = f(m12), f20 = f(m20);
    // hat_i at the midpoints: 1/2 on adjacent edges, 0 opposite
    b(t[0]) += a3 * 0.5 * (f01 + f20);
    b(t[1]) += a3 * 0.5 * (f01 + f12);
    b(t[2]) += a3 * 0.5 * (f12 + f20);
  }
  return b;
}

std::vector<double> alpha_from_mesh(const Mesh& mesh) {
  std::vector<double> a(mesh.boundary_edges.size());
  for (std::size_t e = 0; e < a.size(); ++e) a[e] = mesh.boundary_edges[e].alpha;
  return a;
}

std::vector<double> alpha_constant(const Mesh& mesh, double a) {
  return std::vector<double>(mesh.boundary_edges.size(), a);
}

Eigen::MatrixX2d cell_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  Eigen::MatrixX2d g(mesh.n_cells(), 2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto hg = hat_gradients(mesh, c);
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < 3; ++i) v += nodal(mesh.triangles[c][i]) * hg[i];
    g.row(c) = v.transpose();
  }
  return g;
}

double l2_norm(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  // Consistent P1 mass, computed per element.
  double s = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    double u0 = nodal(t[0]), u1 = nodal(t[1]), u2 = nodal(t[2]);
    s += mesh.cell_areas[c] / 6.0 *
         (u0 * u0 + u1 * u1 + u2 * u2 + u0 * u1 + u1 * u2 + u2 * u0);
  }
  return std::sqrt(s);
}

double h1_norm(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  double l2 = l2_norm(mesh, nodal);
  Eigen::MatrixX2d g = cell_gradient(mesh, nodal);
  double gs = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) gs += mesh.cell_areas[c] * g.row(c).squaredNorm();
  return std::sqrt(l2 * l2 + gs);
}

double h2_proxy(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  Eigen::MatrixX2d g = cell_gradient(mesh, nodal);
  // Recover a nodal gradient by area-weighted averaging, then measure its
  // broken H1 seminorm.
  Eigen::MatrixX2d rec = Eigen::MatrixX2d::Zero(mesh.n_vertices(), 2);
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int i = 0; i < 3; ++i) {
      rec.row(mesh.triangles[c][i]) += mesh.cell_areas[c] * g.row(c);
      wsum(mesh.triangles[c][i]) += mesh.cell_areas[c];
    }
  for (int v = 0; v < mesh.n_vertices(); ++v) rec.row(v) /= wsum(v);
  double s = 0;
  for (int comp = 0; comp < 2; ++comp) {
    Eigen::MatrixX2d gg = cell_gradient(mesh, rec.col(comp));
    for (int c = 0; c < mesh.n_cells(); ++c) s += mesh.cell_areas[c] * gg.row(c).squaredNorm();
  }
  return std::sqrt(s);
}

PoissonSystem assemble_poisson(const Mesh& mesh, const std::vector<double>& alpha_edge) {
  for (double a : alpha_edge)
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha outside [0,1]");
  PoissonSystem sys;
  sys.A = assemble_stiffness(mesh);
  bool zero = true;
  for (double a : alpha_edge)
    if (a != 0.0) zero = false;
  if (!zero) sys.A = sys.A + assemble_boundary_mass(mesh, alpha_edge);
  sys.neumann = zero;
  sys.load = lumped_load(mesh);
  return sys;
}

IterResult cg(const MatVec& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int maxit) {
  IterResult res;
  const double bnorm = b.norm();
  if (bnorm == 0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  if (x.size() != b.size()) x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b - A(x);
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < maxit; ++it) {
    Eigen::VectorXd Ap = A(p);
    double alpha = rr / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    double rr_new = r.squaredNorm();
    res.iterations = it + 1;
    if (std::sqrt(rr_new) <= tol * bnorm) {
      res.converged = true;
      res.rel_residual = std::sqrt(rr_new) / bnorm;
      return res;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  res.rel_residual = std::sqrt(rr) / bnorm;
  return res;
}

IterResult minres(const MatVec& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                  int maxit) {
  IterResult res;
  const int n = static_cast<int>(b.size());
  x = Eigen::VectorXd::Zero(n);
  const double beta1 = b.norm();
  if (beta1 == 0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXd r1 = b, r2 = b, y = b;
  double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1;
  double cs = -1, sn = 0, oldeps = 0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n), w2 = Eigen::VectorXd::Zero(n);
  for (int it = 1; it <= maxit; ++it) {
    Eigen::VectorXd v = y / beta;
    y = A(v);
    if (it >= 2) y -= (beta / oldb) * r1;
    double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    oldb = beta;
    beta = y.norm();
    oldeps = epsln;
    double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::max(std::sqrt(gbar * gbar + beta * beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;
    Eigen::VectorXd w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    res.iterations = it;
    if (phibar <= tol * beta1) {
      res.converged = true;
      break;
    }
  }
  res.rel_residual = phibar / beta1;
  return res;
}

Eigen::VectorXd solve_constrained(const SpMat& A, const std::vector<Eigen::VectorXd>& constraints,
                                  const Eigen::VectorXd& b, double tol, int maxit,
                                  IterResult* info) {
  const int n = static_cast<int>(b.size());
  const int m = static_cast<int>(constraints.size());
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = b;
  rhs.tail(m).setZero();
  MatVec op = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(n + m);
    out.head(n) = A * v.head(n);
    for (int k = 0; k < m; ++k) {
      out.head(n) += v(n + k) * constraints[k];
      out(n + k) = constraints[k].dot(v.head(n));
    }
    return out;
  };
  Eigen::VectorXd x;
  IterResult res = minres(op, rhs, x, tol, maxit);
  if (info) *info = res;
  if (!res.converged) throw std::runtime_error("constrained MINRES did not converge");
  return x.head(n);
}

ScalarField solve_poisson(const Mesh& mesh, const PoissonSystem& sys, const Eigen::VectorXd& rhs,
                          SolveStats* stats) {
  SolveStats st;
  Eigen::VectorXd u;
  const double tol = 1e-10;
  const int maxit = 20000;
  if (sys.neumann) {
    double source_mean = rhs.sum();  // = <xi> for consistent P1 load vectors
    double scale = rhs.norm() + 1e-300;
    st.compat_defect = std::abs(source_mean);
    if (st.compat_defect > 1e-10 * std::max(1.0, scale))
      throw std::invalid_argument("Neumann compatibility violated: source has nonzero mean");
    IterResult ir;
    u = solve_constrained(sys.A, {sys.load}, rhs, tol, maxit, &ir);
    st.iterations = ir.iterations;
    st.rel_residual = ir.rel_residual;
  } else {
    MatVec op = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(sys.A * v); };
    IterResult ir = cg(op, rhs, u, tol, maxit);
    if (!ir.converged) throw std::runtime_error("Poisson CG did not converge");
    st.iterations = ir.iterations;
    st.rel_residual = ir.rel_residual;
  }
  st.l2_norm = l2_norm(mesh, u);
  st.h1_norm = h1_norm(mesh, u);
  st.h2_proxy = h2_proxy(mesh, u);
  if (stats) *stats = st;
  ScalarField f;
  f.nodal = std::move(u);
  return f;
}

ScalarField solve_poisson(const Mesh& mesh, const std::vector<double>& alpha_edge,
                          const Eigen::VectorXd& cellwise_source, SolveStats* stats) {
  PoissonSystem sys = assemble_poisson(mesh, alpha_edge);
  return solve_poisson(mesh, sys, rhs_from_cellwise(mesh, cellwise_source), stats);
}

SpMat assemble_lame_stiffness(const Mesh& mesh) {
  std::vector<Triplet> trip;
  trip.reserve(36 * mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto g = hat_gradients(mesh, c);
    const auto& t = mesh.triangles[c];
    const double a = mesh.cell_areas[c];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int gi = 0; gi < 2; ++gi)
          for (int gj = 0; gj < 2; ++gj) {
            double val = 0.5 * a * ((gi == gj ? g[i].dot(g[j]) : 0.0) + g[i](gj) * g[j](gi));
            trip.emplace_back(2 * t[i] + gi, 2 * t[j] + gj, val);
          }
  }
  SpMat A(2 * mesh.n_vertices(), 2 * mesh.n_vertices());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SpMat assemble_vector_stiffness(const Mesh& mesh) {
  SpMat K = assemble_stiffness(mesh);
  std::vector<Triplet> trip;
  trip.reserve(2 * K.nonZeros());
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it) {
      trip.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      trip.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SpMat A(2 * mesh.n_vertices(), 2 * mesh.n_vertices());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SpMat assemble_vector_mass(const Mesh& mesh) {
  SpMat M = assemble_mass(mesh);
  std::vector<Triplet> trip;
  trip.reserve(2 * M.nonZeros());
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      trip.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      trip.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SpMat A(2 * mesh.n_vertices(), 2 * mesh.n_vertices());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SpMat assemble_vector_boundary_mass(const Mesh& mesh, const std::vector<double>& alpha_edge) {
  SpMat B = assemble_boundary_mass(mesh, alpha_edge);
  std::vector<Triplet> trip;
  trip.reserve(2 * B.nonZeros());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      trip.emplace_back(2 * it.row(), 2 * it.col(), it.value());
      trip.emplace_back(2 * it.row() + 1, 2 * it.col() + 1, it.value());
    }
  SpMat A(2 * mesh.n_vertices(), 2 * mesh.n_vertices());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

TangentialReduction tangential_reduction(const Mesh& mesh) {
  TangentialReduction red;
  const int n = mesh.n_vertices();
  // Adjacent boundary edge normals per boundary vertex.
  std::vector<std::vector<Vec2>> adj(n);
  for (const auto& be : mesh.boundary_edges) {
    adj[be.v0].push_back(be.normal);
    adj[be.v1].push_back(be.normal);
  }
  std::vector<int> kind(n, 0);  // 0 interior, 1 tangential, 2 corner
  std::vector<Vec2> vnormal(n, Vec2::Zero());
  for (int v = 0; v < n; ++v) {
    if (adj[v].empty()) continue;
    red.boundary_vertices.push_back(v);
    Vec2 nsum = Vec2::Zero();
    for (const auto& nn : adj[v]) nsum += nn;
    double angle = 0;
    if (adj[v].size() == 2) angle = std::acos(std::clamp(adj[v][0].dot(adj[v][1]), -1.0, 1.0));
    if (adj[v].size() != 2 || angle > std::numbers::pi / 4.0 || nsum.norm() < 1e-12) {
      kind[v] = 2;
      red.corner_vertices.push_back(v);
      red.vertex_normal.push_back(Vec2::Zero());
    } else {
      kind[v] = 1;
      vnormal[v] = nsum.normalized();
      red.vertex_normal.push_back(vnormal[v]);
    }
  }
  std::vector<Triplet> trip;
  int col = 0;
  for (int v = 0; v < n; ++v) {
    if (kind[v] == 0) {
      trip.emplace_back(2 * v, col++, 1.0);
      trip.emplace_back(2 * v + 1, col++, 1.0);
    } else if (kind[v] == 1) {
      Vec2 t(-vnormal[v].y(), vnormal[v].x());
      trip.emplace_back(2 * v, col, t.x());
      trip.emplace_back(2 * v + 1, col, t.y());
      ++col;
    }
  }
  red.Z.resize(2 * n, col);
  red.Z.setFromTriplets(trip.begin(), trip.end());
  return red;
}

LameSystem assemble_lame(const Mesh& mesh, const std::vector<double>& alpha_edge,
                         const RigidFieldBasis& rigid) {
  for (double a : alpha_edge)
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha outside [0,1]");
  LameSystem sys;
  sys.red = tangential_reduction(mesh);
  SpMat A = assemble_lame_stiffness(mesh);
  bool zero = true;
  for (double a : alpha_edge)
    if (a != 0.0) zero = false;
  if (!zero) A = A + assemble_vector_boundary_mass(mesh, alpha_edge);
  sys.neumann = zero;
  sys.A_red = SpMat(sys.red.Z.transpose()) * A * sys.red.Z;
  sys.has_rigid = zero && !rigid.empty();
  if (sys.has_rigid) {
    const Eigen::Matrix2d& J = rigid.basis[0];
    Eigen::VectorXd z(2 * mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      Vec2 r = J * mesh.vertices[v];
      z(2 * v) = r.x();
      z(2 * v + 1) = r.y();
    }
    sys.rigid_red = sys.red.Z.transpose() * z;
    // Constraint row: integral of the skew gradient paired with J, i.e. the
    // nodal coefficients of sum_T A_T curl(U)|_T (up to the J normalization).
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    for (int c = 0; c < mesh.n_cells(); ++c) {
      auto g = hat_gradients(mesh, c);
      const auto& t = mesh.triangles[c];
      for (int i = 0; i < 3; ++i) {
        // curl U = d1 U2 - d2 U1
        ell(2 * t[i]) += -mesh.cell_areas[c] * g[i].y();
        ell(2 * t[i] + 1) += mesh.cell_areas[c] * g[i].x();
      }
    }
    sys.constraint_red = sys.red.Z.transpose() * ell;
  }
  return sys;
}

VectorField solve_lame(const Mesh& mesh, const LameSystem& sys,
                       const Eigen::MatrixX2d& cellwise_source, SolveStats* stats,
                       bool enforce_compat) {
  SolveStats st;
  Eigen::VectorXd b_full = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    double a3 = mesh.cell_areas[c] / 3.0;
    for (int i = 0; i < 3; ++i) {
      b_full(2 * t[i]) += a3 * cellwise_source(c, 0);
      b_full(2 * t[i] + 1) += a3 * cellwise_source(c, 1);
    }
  }
  Eigen::VectorXd b = sys.red.Z.transpose() * b_full;
  const double tol = 1e-10;
  const int maxit = 40000;
  Eigen::VectorXd y;
  if (sys.has_rigid) {
    // Compatibility <Xi, Jx> = 0 (discrete, cellwise quadrature).
    double defect = 0;
    Eigen::Matrix2d J;
    J << 0, -1, 1, 0;
    J /= std::sqrt(2.0);
    double src_norm = 0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      Vec2 r = J * mesh.cell_centroids[c];
      defect += mesh.cell_areas[c] * (cellwise_source(c, 0) * r.x() + cellwise_source(c, 1) * r.y());
      src_norm += mesh.cell_areas[c] * cellwise_source.row(c).squaredNorm();
    }
    st.compat_defect = std::abs(defect);
    if (enforce_compat && st.compat_defect > 1e-10 * std::max(1.0, std::sqrt(src_norm)))
      throw std::invalid_argument("Lame rigid compatibility violated: <Xi, Ax> != 0");
    IterResult ir;
    y = solve_constrained(sys.A_red, {sys.constraint_red}, b, tol, maxit, &ir);
    st.iterations = ir.iterations;
    st.rel_residual = ir.rel_residual;
  } else {
    MatVec op = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(sys.A_red * v); };
    IterResult ir = cg(op, b, y, tol, maxit);
    if (!ir.converged) throw std::runtime_error("Lame CG did not converge");
    st.iterations = ir.iterations;
    st.rel_residual = ir.rel_residual;
  }
  VectorField out;
  out.nodal = sys.red.Z * y;
  st.l2_norm = vector_l2_norm(mesh, out.nodal);
  st.h1_norm = vector_h1_norm(mesh, out.nodal);
  st.h2_proxy = std::sqrt(std::pow(h2_proxy(mesh, Eigen::VectorXd(
                              Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(
                                  out.nodal.data(), mesh.n_vertices()))), 2) +
                          std::pow(h2_proxy(mesh, Eigen::VectorXd(
                              Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<2>>(
                                  out.nodal.data() + 1, mesh.n_vertices()))), 2));
  if (stats) *stats = st;
  return out;
}

Eigen::MatrixX3d cell_sym_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal2n) {
  Eigen::MatrixX3d s(mesh.n_cells(), 3);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    auto g = hat_gradients(mesh, c);
    const auto& t = mesh.triangles[c];
    double sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
      double ux = nodal2n(2 * t[i]);
      double uy = nodal2n(2 * t[i] + 1);
      sxx += ux * g[i].x();
      syy += uy * g[i].y();
      sxy += 0.5 * (ux * g[i].y() + uy * g[i].x());
    }
    s(c, 0) = sxx;
    s(c, 1) = syy;
    s(c, 2) = sxy;
  }
  return s;
}

double vector_l2_norm(const Mesh& mesh, const Eigen::VectorXd& nodal2n) {
  const int n = mesh.n_vertices();
  Eigen::VectorXd ux(n), uy(n);
  for (int v = 0; v < n; ++v) {
    ux(v) = nodal2n(2 * v);
    uy(v) = nodal2n(2 * v + 1);
  }
  double a = l2_norm(mesh, ux), b = l2_norm(mesh, uy);
  return std::sqrt(a * a + b * b);
}

double vector_h1_norm(const Mesh& mesh, const Eigen::VectorXd& nodal2n) {
  const int n = mesh.n_vertices();
  Eigen::VectorXd ux(n), uy(n);
  for (int v = 0; v < n; ++v) {
    ux(v) = nodal2n(2 * v);
    uy(v) = nodal2n(2 * v + 1);
  }
  double a = h1_norm(mesh, ux), b = h1_norm(mesh, uy);
  return std::sqrt(a * a + b * b);
}

std::string matrix_market(const SpMat& A) {
  std::ostringstream os;
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  return os.str();
}

}  // namespace hypokin
