#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypokin/boundary.hpp"
#include "hypokin/collision.hpp"
#include "hypokin/geometry.hpp"
#include "hypokin/velocity.hpp"

namespace hypokin {

struct KineticState {
  Eigen::MatrixXd values;  // cells x velocities, point values of f
  double time = 0;
  double epsilon = 1;
};

struct InitialCondition {
  enum class Kind { Zero, RhoBump, ThetaBump, Shear, Noise, Mixed, TailSeed };
  Kind kind = Kind::RhoBump;
  double amplitude = 1.0;
  Vec2 center = Vec2::Zero();
  double width = 0.15;
};

struct RunConfig {
  double cfl = 0.5;
  double t_end = 1.0;
  double epsilon = 1.0;
  CollisionModel collision;
  int record_every = 10;
  InitialCondition initial_condition;
  std::uint64_t seed = 0;
};

struct TrajectoryRow {
  double t = 0;
  double H_norm = 0;
  double Hperp_norm = 0;
  double rho_L2 = 0;
  double m_L2 = 0;
  double theta_L2 = 0;
  double lyap = 0;
  double boundary_diss = 0;
  double mass_residual = 0;
  double energy_residual = 0;
  double angmom_residual = 0;
  double correction_mag = 0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  double dt = 0;
  std::string to_csv() const;
};

/// Couples a mesh, velocity grid and boundary operator; owns the discrete
/// generator application and the IMEX time stepper.
class TransportSolver {
 public:
  TransportSolver(const Mesh& mesh, const VelocityGrid& grid, const BoundaryOperator& bops);

  // Transport part -v . grad_x f (upwind, Maxwell ghost closure). Also
  // accumulates the flux-correction magnitude of the pass when asked.
  Eigen::MatrixXd apply_transport(const Eigen::MatrixXd& values,
                                  double* correction_mag = nullptr) const;

  Eigen::MatrixXd apply_collision_all(const CollisionModel& model,
                                      const Eigen::MatrixXd& values) const;

  // Full generator  L_eps f = -(1/eps) v . grad f + (1/eps^2) C f.
  Eigen::MatrixXd apply_generator(const CollisionModel& model, const KineticState& state) const;

  double max_dt(double cfl, double epsilon) const;

  KineticState step(const KineticState& state, double dt, const CollisionModel& model,
                    double* correction_mag = nullptr) const;

  Trajectory run(const RunConfig& config, const KineticState& initial,
                 const std::function<double(const KineticState&)>& lyapunov = {}) const;

  KineticState make_admissible(const KineticState& state, bool specular_walls,
                               const RigidFieldBasis& rigid) const;

  KineticState make_initial(const InitialCondition& ic, double epsilon,
                            std::uint64_t seed) const;

  // Global conserved quantities.
  double total_mass(const Eigen::MatrixXd& values) const;
  double total_energy(const Eigen::MatrixXd& values) const;
  double total_angular_momentum(const Eigen::MatrixXd& values) const;

  // Discrete H-norm and inner product (cell areas x weighted velocity sum).
  double inner_H(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const;
  double norm_H(const Eigen::MatrixXd& f) const { return std::sqrt(inner_H(f, f)); }
  // Weighted variants: ||f||^2 with extra velocity weight omega^pm.
  double norm_H_weighted(const Eigen::MatrixXd& f, const Eigen::VectorXd& vweight) const;

  Eigen::MatrixXd micro_part(const Eigen::MatrixXd& values) const;

  const Mesh& mesh() const { return *mesh_; }
  const VelocityGrid& grid() const { return *grid_; }
  const BoundaryOperator& boundary() const { return *bops_; }
  bool specular_walls() const { return specular_walls_; }

 private:
  const Mesh* mesh_;
  const VelocityGrid* grid_;
  const BoundaryOperator* bops_;
  bool specular_walls_ = false;  // alpha == 0 on every edge
  RigidFieldBasis rigid_;

  struct ImplicitCache {
    bool valid = false;
    double c = 0;
    double omega0_exponent = 0;
    Eigen::LLT<Eigen::MatrixXd> llt;
  };
  mutable ImplicitCache weak_cache_;
};

}  // namespace hypokin
