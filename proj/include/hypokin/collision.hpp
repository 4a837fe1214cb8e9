#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "hypokin/velocity.hpp"

namespace hypokin {

/// Velocity-local collision operators. All act on point values of one cell's
/// velocity slice and are self-adjoint, negative semidefinite in the
/// mu^{-1}-weighted product by construction.
///   bgk:        C f = pi f - f
///   mass-relax: C f = rho mu - f
///   weak-bgk:   C f = -(I-pi)[ omega0^{-1} (I-pi) f ]
struct CollisionModel {
  enum class Kind { Bgk, MassRelax, WeakBgk };
  Kind kind = Kind::Bgk;
  double lambda = 1.0;           // spectral-gap constant (1 for bgk)
  double omega0_exponent = 1.0;  // omega0(v) = (1+|v|^2)^s
  double omega1_exponent = 1.0;  // omega1 defaults to omega0

  double omega0(const Vec2& v) const { return std::pow(1.0 + v.squaredNorm(), omega0_exponent); }
  double omega1(const Vec2& v) const { return std::pow(1.0 + v.squaredNorm(), omega1_exponent); }

  static CollisionModel bgk() { return {}; }
  static CollisionModel mass_relax() {
    CollisionModel m;
    m.kind = Kind::MassRelax;
    return m;
  }
  static CollisionModel weak_bgk(double s0 = 1.0) {
    CollisionModel m;
    m.kind = Kind::WeakBgk;
    m.omega0_exponent = s0;
    m.omega1_exponent = s0;
    return m;
  }
};

struct AssumptionReport {
  int kernel_dim = 0;
  double self_adjoint_residual = 0;
  double spectral_gap = 0;                  // smallest nonzero eigenvalue of -C
  std::map<std::string, double> a3_bounds;  // monomial -> ||C(phi mu)||_{mu^-1}
  double weak_gap = 0;                      // coercivity in the omega0^{-1}-weighted norm
  double a4_constant = 0;                   // sampled bound of <Cf,f>_{omega1} / ||f||^2_{omega0^-1}
};

Eigen::VectorXd apply_collision(const CollisionModel& model, const VelocityGrid& grid,
                                const Eigen::VectorXd& f_v);

// Dense velocity-only operator matrix in point-value coordinates.
Eigen::MatrixXd collision_matrix(const CollisionModel& model, const VelocityGrid& grid);

AssumptionReport verify_assumptions(const CollisionModel& model, const VelocityGrid& grid,
                                    std::uint64_t seed = 0);

}  // namespace hypokin
