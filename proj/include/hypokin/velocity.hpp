#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hypokin/geometry.hpp"

namespace hypokin {

/// Discrete velocity space on a Gauss-Hermite tensor grid. States carry point
/// values f(v_k); the weights are absorbed so that sum_k w_k f_k approximates
/// integral f dv exactly for polynomial-times-Maxwellian integrands up to the
/// rule's degree. All inner products are mu^{-1}-weighted:
///   (f,g)_v = sum_k (w_k / mu_k) f_k g_k.
struct VelocityGrid {
  int n_per_axis = 0;
  int nv = 0;  // n_per_axis^2
  Eigen::VectorXd nodes_1d;    // symmetric under sign flip (bit-exact)
  Eigen::VectorXd weights_1d;  // Gauss weights for the standard normal, sum 1
  std::vector<Vec2> nodes;     // node k = (nodes_1d[i], nodes_1d[j]), k = i*n + j
  Eigen::VectorXd w;           // absorbed weights: w_k = gauss_k / mu_k
  Eigen::VectorXd mu;          // Maxwellian values mu(v_k)
  Eigen::VectorXd w_mu;        // gauss weights w_k * mu_k
  Eigen::VectorXd w_over_mu;   // w_k / mu_k
  Eigen::VectorXd energy_mode; // e(v_k) = (|v_k|^2 - d)/sqrt(2d)
  double v_max = 0;            // max |v_k|_2

  int idx(int i, int j) const { return i * n_per_axis + j; }

  // Velocity-only inner product and norm.
  double dot_v(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    return (w_over_mu.array() * f.array() * g.array()).sum();
  }
  double norm_v(const Eigen::VectorXd& f) const { return std::sqrt(dot_v(f, f)); }
};

VelocityGrid gauss_hermite_grid(int n_per_axis);

struct MacroFields {
  Eigen::VectorXd rho;            // per cell
  Eigen::MatrixX2d m;             // per cell, 2 components
  Eigen::VectorXd theta;          // per cell
};

/// Moment fields of the auxiliary functionals: Mp (vector) and Mq (symmetric
/// 2x2, stored as xx / yy / xy columns).
struct MomentFields {
  Eigen::MatrixX2d Mp;
  Eigen::MatrixX3d Mq;  // columns: xx, yy, xy
};

// Cell-local projector onto span{mu, v1 mu, v2 mu, |v|^2 mu}.
Eigen::VectorXd project_pi(const VelocityGrid& grid, const Eigen::VectorXd& f_v);

struct KineticState;  // transport.hpp

MacroFields moments(const VelocityGrid& grid, const Eigen::MatrixXd& values);
MomentFields moment_fields(const VelocityGrid& grid, const Eigen::MatrixXd& values);

}  // namespace hypokin
