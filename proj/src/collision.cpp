#include "hypokin/collision.hpp"

#include <Eigen/Eigenvalues>

#include "hypokin/rng.hpp"

namespace hypokin {

Eigen::VectorXd apply_collision(const CollisionModel& model, const VelocityGrid& grid,
                                const Eigen::VectorXd& f_v) {
  switch (model.kind) {
    case CollisionModel::Kind::Bgk:
      return project_pi(grid, f_v) - f_v;
    case CollisionModel::Kind::MassRelax: {
      double rho = grid.w.dot(f_v);
      return rho * grid.mu - f_v;
    }
    case CollisionModel::Kind::WeakBgk: {
      Eigen::VectorXd t = f_v - project_pi(grid, f_v);
      for (int k = 0; k < grid.nv; ++k) t(k) /= model.omega0(grid.nodes[k]);
      Eigen::VectorXd out = project_pi(grid, t) - t;
      return out;
    }
  }
  return Eigen::VectorXd::Zero(grid.nv);
}

Eigen::MatrixXd collision_matrix(const CollisionModel& model, const VelocityGrid& grid) {
  Eigen::MatrixXd M(grid.nv, grid.nv);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(grid.nv);
  for (int k = 0; k < grid.nv; ++k) {
    e(k) = 1.0;
    M.col(k) = apply_collision(model, grid, e);
    e(k) = 0.0;
  }
  return M;
}

AssumptionReport verify_assumptions(const CollisionModel& model, const VelocityGrid& grid,
                                    std::uint64_t seed) {
  AssumptionReport rep;
  const int nv = grid.nv;
  Eigen::MatrixXd C = collision_matrix(model, grid);

  // Symmetrize in the weighted product: S = D^{1/2} C D^{-1/2}, D = w/mu.
  Eigen::VectorXd dsqrt = grid.w_over_mu.array().sqrt();
  Eigen::MatrixXd S = dsqrt.asDiagonal() * C * dsqrt.cwiseInverse().asDiagonal();
  rep.self_adjoint_residual = (S - S.transpose()).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending, all <= 0
  const double ktol = 1e-10;
  rep.kernel_dim = 0;
  rep.spectral_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nv; ++k) {
    if (std::abs(ev(k)) <= ktol)
      ++rep.kernel_dim;
    else
      rep.spectral_gap = std::min(rep.spectral_gap, std::abs(ev(k)));
  }

  // (A3): ||C(phi mu)|| for all monomials of degree <= 4.
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      Eigen::VectorXd phimu(nv);
      for (int k = 0; k < nv; ++k)
        phimu(k) = std::pow(grid.nodes[k].x(), a) * std::pow(grid.nodes[k].y(), b) * grid.mu(k);
      double nrm = grid.norm_v(apply_collision(model, grid, phimu));
      rep.a3_bounds["v1^" + std::to_string(a) + " v2^" + std::to_string(b)] = nrm;
    }

  // Weak gap: min over random f of (-Cf,f) / ||f_perp||^2_{omega0^-1 mu^-1};
  // for weak-bgk this ratio is 1 identically. (A4) surrogate constant:
  // max of <Cf,f>_{omega1 mu^-1} / ||f||^2_{omega0^-1 mu^-1}.
  auto gen = substream(seed, "collision.verify");
  std::normal_distribution<double> nd;
  double wgap = std::numeric_limits<double>::infinity();
  double a4 = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 100; ++s) {
    Eigen::VectorXd f(nv);
    for (int k = 0; k < nv; ++k) f(k) = nd(gen) * grid.mu(k);
    Eigen::VectorXd fperp = f - project_pi(grid, f);
    Eigen::VectorXd Cf = apply_collision(model, grid, f);
    double num = -grid.dot_v(Cf, f);
    double den = 0, den1 = 0, num1 = 0;
    for (int k = 0; k < nv; ++k) {
      den += grid.w_over_mu(k) / model.omega0(grid.nodes[k]) * fperp(k) * fperp(k);
      den1 += grid.w_over_mu(k) / model.omega0(grid.nodes[k]) * f(k) * f(k);
      num1 += grid.w_over_mu(k) * model.omega1(grid.nodes[k]) * Cf(k) * f(k);
    }
    if (den > 0) wgap = std::min(wgap, num / den);
    if (den1 > 0) a4 = std::max(a4, num1 / den1);
  }
  rep.weak_gap = wgap;
  rep.a4_constant = a4;
  return rep;
}

}  // namespace hypokin
