#include "hypokin/korn.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hypokin/rng.hpp"

namespace hypokin {

namespace {

void project_out(Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& constraints) {
  for (const auto& c : constraints) x -= (c.dot(x) / c.squaredNorm()) * c;
}

// Inverse iteration on the pencil (A,B) over {c . x = 0}: each step solves
// the saddle system [A C^T; C 0] y = [B x; 0] with MINRES.
GenEigResult inverse_iteration(const SpMat& A, const SpMat& B,
                               const std::vector<Eigen::VectorXd>& constraints,
                               Eigen::VectorXd x, double tol, int maxit) {
  GenEigResult res;
  project_out(x, constraints);
  x /= std::sqrt(x.dot(B * x));
  double lambda_old = std::numeric_limits<double>::max();
  for (int it = 0; it < maxit; ++it) {
    Eigen::VectorXd rhs = B * x;
    Eigen::VectorXd y;
    if (constraints.empty()) {
      MatVec op = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(A * v); };
      IterResult ir = cg(op, rhs, y, 1e-12, 20000);
      if (!ir.converged) throw std::runtime_error("inverse iteration: CG failed");
    } else {
      y = solve_constrained(A, constraints, rhs, 1e-12, 40000);
    }
    project_out(y, constraints);
    double ynb = std::sqrt(y.dot(B * y));
    x = y / ynb;
    double lambda = x.dot(A * x) / x.dot(B * x);
    res.iterations = it + 1;
    if (std::abs(lambda - lambda_old) <= tol * std::abs(lambda)) {
      res.lambda = lambda;
      res.x = x;
      return res;
    }
    lambda_old = lambda;
  }
  res.lambda = lambda_old;
  res.x = x;
  return res;
}

// LOBPCG-style block iteration (block 2, Rayleigh-Ritz over [X W P]) with the
// constraint projection applied every iteration.
GenEigResult block_iteration(const SpMat& A, const SpMat& B,
                             const std::vector<Eigen::VectorXd>& constraints, int n,
                             std::uint64_t seed, double tol, int maxit) {
  const int bs = 2;
  auto gen = substream(seed, "korn.lobpcg");
  std::normal_distribution<double> nd;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      if (it.row() == it.col()) diag(it.row()) = it.value();
  double shift = 1e-8 * diag.maxCoeff();
  auto precond = [&](const Eigen::VectorXd& r) {
    return Eigen::VectorXd((r.array() / (diag.array() + shift)).matrix());
  };

  Eigen::MatrixXd X(n, bs);
  for (int j = 0; j < bs; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = nd(gen);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, bs);
  GenEigResult res;
  double lambda_old = std::numeric_limits<double>::max();

  for (int it = 0; it < maxit; ++it) {
    for (int j = 0; j < bs; ++j) {
      Eigen::VectorXd c = X.col(j);
      project_out(c, constraints);
      X.col(j) = c;
    }
    // Residuals W = precond(A X - B X diag(rq))
    Eigen::MatrixXd AX = A * X, BX = B * X;
    Eigen::MatrixXd W(n, bs);
    for (int j = 0; j < bs; ++j) {
      double rq = X.col(j).dot(AX.col(j)) / X.col(j).dot(BX.col(j));
      Eigen::VectorXd r = AX.col(j) - rq * BX.col(j);
      r = precond(r);
      project_out(r, constraints);
      W.col(j) = r;
    }
    // Trial subspace
    Eigen::MatrixXd S(n, 3 * bs);
    S << X, W, P;
    // Drop near-dependent columns via B-orthonormalization (modified Gram-Schmidt).
    std::vector<int> keep;
    Eigen::MatrixXd Q(n, 3 * bs);
    int q = 0;
    for (int j = 0; j < S.cols(); ++j) {
      Eigen::VectorXd v = S.col(j);
      for (int k = 0; k < q; ++k) v -= (Q.col(k).dot(B * v)) * Q.col(k);
      double nb = std::sqrt(std::abs(v.dot(B * v)));
      if (nb > 1e-10) {
        Q.col(q) = v / nb;
        ++q;
      }
    }
    Eigen::MatrixXd Qk = Q.leftCols(q);
    Eigen::MatrixXd Ak = Qk.transpose() * (A * Qk);
    Eigen::MatrixXd Bk = Qk.transpose() * (B * Qk);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        0.5 * (Ak + Ak.transpose()), 0.5 * (Bk + Bk.transpose()));
    Eigen::MatrixXd Xnew(n, bs);
    for (int j = 0; j < bs && j < q; ++j) Xnew.col(j) = Qk * ges.eigenvectors().col(j);
    P = Xnew - X;
    X = Xnew;
    double lambda = ges.eigenvalues()(0);
    res.iterations = it + 1;
    if (std::abs(lambda - lambda_old) <= tol * std::abs(lambda)) {
      res.lambda = lambda;
      res.x = X.col(0);
      return res;
    }
    lambda_old = lambda;
  }
  res.lambda = lambda_old;
  res.x = X.col(0);
  return res;
}

bool certify_constant(const SpMat& num, const SpMat& den,
                      const std::vector<Eigen::VectorXd>& constraints, double lambda_min,
                      std::uint64_t seed, int n_samples = 200) {
  // ||U||^2_num <= (1+1e-8) (1/lambda) U^T den U for random constrained U,
  // where the eigensolve claims lambda = min den/num... (pencil (den,num)).
  auto gen = substream(seed, "korn.certify");
  std::normal_distribution<double> nd;
  const int n = static_cast<int>(num.rows());
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u(i) = nd(gen);
    project_out(u, constraints);
    double a = u.dot(num * u);
    double b = u.dot(den * u);
    if (b <= 0) continue;
    if (a > (1.0 + 1e-8) * b / lambda_min) return false;
  }
  return true;
}

}  // namespace

GenEigResult smallest_generalized_eigenvalue(const SpMat& A, const SpMat& B,
                                             const std::vector<Eigen::VectorXd>& constraints,
                                             std::uint64_t seed, double tol, int maxit) {
  const int n = static_cast<int>(A.rows());
  auto gen = substream(seed, "korn.invit");
  std::normal_distribution<double> nd;
  Eigen::VectorXd x0(n);
  for (int i = 0; i < n; ++i) x0(i) = nd(gen);
  GenEigResult a = inverse_iteration(A, B, constraints, x0, tol, maxit);
  GenEigResult b = block_iteration(A, B, constraints, n, seed, tol, 2000);
  a.cross_check_rel = std::abs(a.lambda - b.lambda) / std::abs(a.lambda);
  a.iterations += b.iterations;
  return a;
}

double poincare_wirtinger_constant(const Mesh& mesh, InequalityReport* report,
                                   std::uint64_t seed) {
  SpMat K = assemble_stiffness(mesh);
  SpMat M = assemble_mass(mesh);
  Eigen::VectorXd mean_row = lumped_load(mesh);
  GenEigResult ge = smallest_generalized_eigenvalue(K, M, {mean_row}, seed);
  double C = 1.0 / std::sqrt(ge.lambda);
  if (report) {
    report->inequality = "PW";
    report->best_constant = C;
    report->eigenvalue = ge.lambda;
    report->eigenvector = ge.x;
    report->mesh_h = mesh.h_max;
    report->iterations = ge.iterations;
    report->cross_check_rel = ge.cross_check_rel;
    report->certified = certify_constant(M, K, {mean_row}, ge.lambda, seed);
  }
  return C;
}

double robin_poincare_constant(const Mesh& mesh, const std::vector<double>& alpha_edge,
                               InequalityReport* report, std::uint64_t seed) {
  bool zero = true;
  for (double a : alpha_edge)
    if (a != 0.0) zero = false;
  if (zero)
    throw std::invalid_argument("robin_poincare_constant: alpha == 0 (constants break the bound)");
  SpMat A = assemble_stiffness(mesh) + assemble_boundary_mass(mesh, alpha_edge);
  SpMat M = assemble_mass(mesh);
  GenEigResult ge = smallest_generalized_eigenvalue(A, M, {}, seed);
  double C = 1.0 / ge.lambda;  // ||u||^2 <= C a_alpha(u,u)
  if (report) {
    report->inequality = "Robin-P";
    report->best_constant = C;
    report->eigenvalue = ge.lambda;
    report->eigenvector = ge.x;
    report->mesh_h = mesh.h_max;
    report->iterations = ge.iterations;
    report->cross_check_rel = ge.cross_check_rel;
    report->certified = certify_constant(M, A, {}, ge.lambda, seed);
  }
  return C;
}

InequalityReport korn_constant(const Mesh& mesh, const std::vector<double>& alpha_edge,
                               KornVariant variant, std::uint64_t seed) {
  InequalityReport rep;
  rep.mesh_h = mesh.h_max;
  RigidFieldBasis rigid = rigid_fields(mesh, 1e-10 * mesh.boundary_length);

  if (variant == KornVariant::L2) {
    // ||grad U||^2 <= C (||grad^s U||^2 + ||U||^2) over all of H^1.
    SpMat A = assemble_lame_stiffness(mesh) + assemble_vector_mass(mesh);
    SpMat B = assemble_vector_stiffness(mesh);
    GenEigResult ge = smallest_generalized_eigenvalue(A, B, {}, seed);
    rep.inequality = "Korn-L2";
    rep.eigenvalue = ge.lambda;
    rep.best_constant = 1.0 / ge.lambda;
    rep.eigenvector = ge.x;
    rep.iterations = ge.iterations;
    rep.cross_check_rel = ge.cross_check_rel;
    rep.certified = certify_constant(B, A, {}, ge.lambda, seed);
    return rep;
  }

  bool zero = true;
  for (double a : alpha_edge)
    if (a != 0.0) zero = false;
  if (variant == KornVariant::Robin && zero)
    throw std::invalid_argument("korn_constant(Robin) requires alpha != 0");

  LameSystem sys = assemble_lame(mesh, alpha_edge, rigid);
  SpMat ZB = SpMat(sys.red.Z.transpose()) *
             (assemble_vector_mass(mesh) + assemble_vector_stiffness(mesh)) * sys.red.Z;
  std::vector<Eigen::VectorXd> constraints;
  if (variant == KornVariant::Rigid && sys.has_rigid) {
    constraints.push_back(sys.constraint_red);
    rep.rigid_constraint_used = true;
  }
  GenEigResult ge = smallest_generalized_eigenvalue(sys.A_red, ZB, constraints, seed);
  rep.inequality = variant == KornVariant::Robin ? "Korn-Robin" : "Korn-rigid";
  rep.eigenvalue = ge.lambda;
  rep.best_constant = 1.0 / std::sqrt(ge.lambda);
  rep.eigenvector = ge.x;
  rep.iterations = ge.iterations;
  rep.cross_check_rel = ge.cross_check_rel;
  rep.certified = certify_constant(ZB, sys.A_red, constraints, ge.lambda, seed);
  return rep;
}

double sampled_ratio(const std::function<double(const Eigen::VectorXd&)>& lhs,
                     const std::function<double(const Eigen::VectorXd&)>& rhs, int dim,
                     int n_samples, std::uint64_t seed) {
  auto gen = substream(seed, "korn.sampled_ratio");
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd u(dim);
    for (int i = 0; i < dim; ++i) u(i) = nd(gen);
    double denom = rhs(u);
    if (denom <= 1e-14) continue;
    worst = std::max(worst, lhs(u) / denom);
  }
  return worst;
}

}  // namespace hypokin
