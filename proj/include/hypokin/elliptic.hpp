#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "hypokin/geometry.hpp"

namespace hypokin {

using SpMat = Eigen::SparseMatrix<double>;

struct ScalarField {
  Eigen::VectorXd nodal;
  std::string produced_by;
};

struct VectorField {
  Eigen::VectorXd nodal;  // 2n, components interleaved (2i, 2i+1)
  std::string produced_by;
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0;
  double l2_norm = 0;
  double h1_norm = 0;
  double h2_proxy = 0;
  double compat_defect = 0;
};

// ---- P1 assembly primitives -------------------------------------------------

SpMat assemble_stiffness(const Mesh& mesh);
SpMat assemble_mass(const Mesh& mesh);  // consistent
// Boundary mass with weight alpha/(2-alpha), edge-midpoint (lumped) rule.
SpMat assemble_boundary_mass(const Mesh& mesh, const std::vector<double>& alpha_edge);

Eigen::VectorXd lumped_load(const Mesh& mesh);  // l_i = integral of hat_i
Eigen::VectorXd rhs_from_cellwise(const Mesh& mesh, const Eigen::VectorXd& cell_values);
Eigen::VectorXd rhs_from_function(const Mesh& mesh, const std::function<double(Vec2)>& f);

std::vector<double> alpha_from_mesh(const Mesh& mesh);
std::vector<double> alpha_constant(const Mesh& mesh, double a);

// Per-cell gradient of a P1 nodal field.
Eigen::MatrixX2d cell_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal);
double h1_norm(const Mesh& mesh, const Eigen::VectorXd& nodal);
double l2_norm(const Mesh& mesh, const Eigen::VectorXd& nodal);
// Gradient-recovery based H2 seminorm proxy.
double h2_proxy(const Mesh& mesh, const Eigen::VectorXd& nodal);

// ---- Scalar problem ---------------------------------------------------------

struct PoissonSystem {
  SpMat A;  // stiffness + boundary mass
  bool neumann = false;
  Eigen::VectorXd load;  // mean-zero constraint row when neumann
};

PoissonSystem assemble_poisson(const Mesh& mesh, const std::vector<double>& alpha_edge);

ScalarField solve_poisson(const Mesh& mesh, const PoissonSystem& sys,
                          const Eigen::VectorXd& rhs, SolveStats* stats = nullptr);
// Convenience: cellwise source, assembly included.
ScalarField solve_poisson(const Mesh& mesh, const std::vector<double>& alpha_edge,
                          const Eigen::VectorXd& cellwise_source, SolveStats* stats = nullptr);

// ---- Lame-type problem ------------------------------------------------------

/// Strong U.n = 0 reduction: boundary vertex DOF pairs rotated to
/// (normal, tangential) with the normal one eliminated; corners pinned.
struct TangentialReduction {
  SpMat Z;  // 2n x n_red
  std::vector<int> corner_vertices;
  std::vector<int> boundary_vertices;
  std::vector<Vec2> vertex_normal;  // indexed like boundary_vertices
};

TangentialReduction tangential_reduction(const Mesh& mesh);

struct LameSystem {
  SpMat A_red;  // Z^T (sym-gradient stiffness + boundary mass) Z
  TangentialReduction red;
  bool neumann = false;
  bool has_rigid = false;
  Eigen::VectorXd rigid_red;       // reduced coordinates of the rotation field Jx/sqrt(2)
  Eigen::VectorXd constraint_red;  // row of P_Omega <grad^a U> = 0 in reduced coords
};

SpMat assemble_lame_stiffness(const Mesh& mesh);      // full 2n x 2n, sym-gradient form
SpMat assemble_vector_stiffness(const Mesh& mesh);    // full-gradient form (per component)
SpMat assemble_vector_mass(const Mesh& mesh);         // consistent, per component
SpMat assemble_vector_boundary_mass(const Mesh& mesh, const std::vector<double>& alpha_edge);

LameSystem assemble_lame(const Mesh& mesh, const std::vector<double>& alpha_edge,
                         const RigidFieldBasis& rigid);

/// Solves the Lame-type system for a cellwise vector source (n_c x 2).
/// When enforce_compat, the rigid compatibility <Xi, Ax> = 0 is a hard
/// precondition (1e-10); otherwise the defect is only recorded in stats.
VectorField solve_lame(const Mesh& mesh, const LameSystem& sys,
                       const Eigen::MatrixX2d& cellwise_source, SolveStats* stats = nullptr,
                       bool enforce_compat = true);

Eigen::MatrixX3d cell_sym_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal2n);
double vector_h1_norm(const Mesh& mesh, const Eigen::VectorXd& nodal2n);
double vector_l2_norm(const Mesh& mesh, const Eigen::VectorXd& nodal2n);

// ---- Iterative solvers ------------------------------------------------------

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct IterResult {
  int iterations = 0;
  double rel_residual = 0;
  bool converged = false;
};

IterResult cg(const MatVec& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
              int maxit);
IterResult minres(const MatVec& A, const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol,
                  int maxit);

// Saddle-point solve [A C^T; C 0] via MINRES; constraints as dense rows.
Eigen::VectorXd solve_constrained(const SpMat& A, const std::vector<Eigen::VectorXd>& constraints,
                                  const Eigen::VectorXd& b, double tol, int maxit,
                                  IterResult* info = nullptr);

std::string matrix_market(const SpMat& A);

}  // namespace hypokin
