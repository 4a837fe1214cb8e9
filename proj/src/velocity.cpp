#include "hypokin/velocity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hypokin {

namespace {

// Gauss nodes/weights for the standard normal weight via Golub-Welsch on the
// probabilists' Hermite recurrence. Nodes and weights are symmetrized so the
// grid is bit-exact under v -> -v.
void gauss_hermite_1d(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(static_cast<double>(k));
    jac(k - 1, k) = b;
    jac(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x = es.eigenvalues();
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    double c = es.eigenvectors()(0, k);
    w(k) = c * c;
  }
  for (int i = 0; i < n / 2; ++i) {
    int j = n - 1 - i;
    double s = 0.5 * (x(j) - x(i));
    x(i) = -s;
    x(j) = s;
    double ww = 0.5 * (w(i) + w(j));
    w(i) = ww;
    w(j) = ww;
  }
  if (n % 2) x(n / 2) = 0.0;
}

}  // namespace

VelocityGrid gauss_hermite_grid(int n_per_axis) {
  if (n_per_axis < 6)
    throw std::invalid_argument(
        "velocity grid needs n_per_axis >= 6 to integrate degree-8 polynomials exactly");
  VelocityGrid g;
  g.n_per_axis = n_per_axis;
  g.nv = n_per_axis * n_per_axis;
  gauss_hermite_1d(n_per_axis, g.nodes_1d, g.weights_1d);

  g.nodes.resize(g.nv);
  g.w.resize(g.nv);
  g.mu.resize(g.nv);
  g.w_mu.resize(g.nv);
  g.w_over_mu.resize(g.nv);
  g.energy_mode.resize(g.nv);
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  g.v_max = 0;
  for (int i = 0; i < n_per_axis; ++i)
    for (int j = 0; j < n_per_axis; ++j) {
      int k = g.idx(i, j);
      Vec2 v(g.nodes_1d(i), g.nodes_1d(j));
      g.nodes[k] = v;
      double gauss = g.weights_1d(i) * g.weights_1d(j);
      double mu = inv2pi * std::exp(-0.5 * v.squaredNorm());
      g.mu(k) = mu;
      g.w_mu(k) = gauss;
      g.w(k) = gauss / mu;
      g.w_over_mu(k) = g.w(k) / mu;
      g.energy_mode(k) = 0.5 * (v.squaredNorm() - 2.0);  // (|v|^2-d)/sqrt(2d), d = 2
      g.v_max = std::max(g.v_max, v.norm());
    }
  return g;
}

Eigen::VectorXd project_pi(const VelocityGrid& grid, const Eigen::VectorXd& f_v) {
  double rho = grid.w.dot(f_v);
  double m1 = 0, m2 = 0, th = 0;
  for (int k = 0; k < grid.nv; ++k) {
    double wf = grid.w(k) * f_v(k);
    m1 += grid.nodes[k].x() * wf;
    m2 += grid.nodes[k].y() * wf;
    th += grid.energy_mode(k) * wf;
  }
  Eigen::VectorXd out(grid.nv);
  for (int k = 0; k < grid.nv; ++k) {
    out(k) = (rho + m1 * grid.nodes[k].x() + m2 * grid.nodes[k].y() +
              th * grid.energy_mode(k)) *
             grid.mu(k);
  }
  return out;
}

MacroFields moments(const VelocityGrid& grid, const Eigen::MatrixXd& values) {
  const int nc = static_cast<int>(values.rows());
  if (values.cols() != grid.nv) throw std::invalid_argument("state/grid shape mismatch");
  MacroFields mf;
  mf.rho.resize(nc);
  mf.m.resize(nc, 2);
  mf.theta.resize(nc);
  Eigen::VectorXd wv1(grid.nv), wv2(grid.nv), we(grid.nv);
  for (int k = 0; k < grid.nv; ++k) {
    wv1(k) = grid.w(k) * grid.nodes[k].x();
    wv2(k) = grid.w(k) * grid.nodes[k].y();
    we(k) = grid.w(k) * grid.energy_mode(k);
  }
  mf.rho = values * grid.w;
  mf.m.col(0) = values * wv1;
  mf.m.col(1) = values * wv2;
  mf.theta = values * we;
  return mf;
}

MomentFields moment_fields(const VelocityGrid& grid, const Eigen::MatrixXd& values) {
  const int nc = static_cast<int>(values.rows());
  MomentFields out;
  out.Mp.resize(nc, 2);
  out.Mq.resize(nc, 3);
  Eigen::VectorXd wp1(grid.nv), wp2(grid.nv), wqxx(grid.nv), wqyy(grid.nv), wqxy(grid.nv);
  for (int k = 0; k < grid.nv; ++k) {
    const Vec2& v = grid.nodes[k];
    double pfac = (v.squaredNorm() - 4.0) / 2.0;  // (|v|^2 - d - 2)/sqrt(2d), d = 2
    wp1(k) = grid.w(k) * v.x() * pfac;
    wp2(k) = grid.w(k) * v.y() * pfac;
    wqxx(k) = grid.w(k) * (v.x() * v.x() - 1.0);
    wqyy(k) = grid.w(k) * (v.y() * v.y() - 1.0);
    wqxy(k) = grid.w(k) * v.x() * v.y();
  }
  out.Mp.col(0) = values * wp1;
  out.Mp.col(1) = values * wp2;
  out.Mq.col(0) = values * wqxx;
  out.Mq.col(1) = values * wqyy;
  out.Mq.col(2) = values * wqxy;
  return out;
}

}  // namespace hypokin
