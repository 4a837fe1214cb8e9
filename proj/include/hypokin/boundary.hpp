#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hypokin/geometry.hpp"
#include "hypokin/velocity.hpp"

namespace hypokin {

/// Specular stencil row for one incoming node: interpolation weights over
/// outgoing nodes, acting on the Maxwellian-normalized trace h = g/mu so that
/// g = mu is reproduced exactly. Weights sum to 1.
struct SpecularRow {
  int in_node = -1;
  int n_terms = 0;
  std::array<int, 4> cols{};
  std::array<double, 4> wts{};
};

/// Discrete Maxwell reflection data for one boundary edge.
struct BoundaryEdgeOp {
  double alpha = 0;
  Vec2 normal;
  double length = 0;
  std::vector<int> out_nodes;  // v . n > 0
  std::vector<int> in_nodes;   // v . n < 0  (v . n == 0 carries no flux)
  std::vector<SpecularRow> specular;
  double c_mu = 0;         // 1 / sum_out w mu (n.v)
  double mu_flux_in = 0;   // sum_in  w mu |n.v|
  double beta = 0;         // energy correction mode (|v|^2 - beta) mu has zero mass flux
  double energy_mode_flux = 0;  // sum_in w |v|^2 (|v|^2-beta) mu |n.v|
};

struct ReflectResult {
  Eigen::VectorXd g_in;  // indexed like in_nodes
  double c0 = 0;         // mass-flux correction coefficient
  double c2 = 0;         // energy-flux correction coefficient (alpha == 0 only)
};

class BoundaryOperator {
 public:
  BoundaryOperator(const Mesh& mesh, const VelocityGrid& grid);

  const BoundaryEdgeOp& edge(int boundary_edge_id) const { return edges_[boundary_edge_id]; }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  // Outgoing trace of a cell slice, indexed like edge.out_nodes.
  Eigen::VectorXd outgoing_trace(int edge_id, const Eigen::VectorXd& cell_values) const;

  // Diffusive part alone: D g on incoming nodes.
  Eigen::VectorXd diffusive_apply(int edge_id, const Eigen::VectorXd& g_out) const;

  // Full Maxwell reflection (1-alpha) specular + alpha diffusive, followed by
  // the flux-exactness correction.
  ReflectResult maxwell_reflect(int edge_id, const Eigen::VectorXd& g_out) const;

  // ||sqrt(alpha(2-alpha)) Dperp f_+||^2 over the whole boundary, where f_+ is
  // the upwind trace of `values` (cells x velocities).
  double dperp_boundary_norm(const VelocityGrid& grid, const Mesh& mesh,
                             const Eigen::MatrixXd& values) const;

  const VelocityGrid& grid() const { return *grid_; }

 private:
  std::vector<BoundaryEdgeOp> edges_;
  const VelocityGrid* grid_;
};

}  // namespace hypokin
