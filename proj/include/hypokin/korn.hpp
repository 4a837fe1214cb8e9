#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hypokin/elliptic.hpp"
#include "hypokin/geometry.hpp"

namespace hypokin {

struct InequalityReport {
  std::string inequality;  // "PW", "Robin-P", "Korn-Robin", "Korn-rigid", "Korn-L2"
  double best_constant = 0;
  double eigenvalue = 0;
  Eigen::VectorXd eigenvector;  // minimizing field (nodal / reduced coords)
  double mesh_h = 0;
  int iterations = 0;
  bool certified = false;          // 200-sample Rayleigh-quotient check
  double cross_check_rel = 0;      // inverse iteration vs block iteration
  bool rigid_constraint_used = false;
};

/// Smallest eigenvalue of the symmetric pencil (A, B) restricted to the
/// subspace orthogonal (in the plain dot product) to the given constraint
/// rows. Two independent iterations are run and cross-checked.
struct GenEigResult {
  double lambda = 0;
  Eigen::VectorXd x;
  int iterations = 0;
  double cross_check_rel = 0;
};

GenEigResult smallest_generalized_eigenvalue(const SpMat& A, const SpMat& B,
                                             const std::vector<Eigen::VectorXd>& constraints,
                                             std::uint64_t seed, double tol = 1e-11,
                                             int maxit = 400);

double poincare_wirtinger_constant(const Mesh& mesh, InequalityReport* report = nullptr,
                                   std::uint64_t seed = 0);
double robin_poincare_constant(const Mesh& mesh, const std::vector<double>& alpha_edge,
                               InequalityReport* report = nullptr, std::uint64_t seed = 0);

enum class KornVariant { Robin, Rigid, L2 };

InequalityReport korn_constant(const Mesh& mesh, const std::vector<double>& alpha_edge,
                               KornVariant variant, std::uint64_t seed = 0);

/// Empirical best constant of a sampled inequality lhs(U) <= C rhs(U): the
/// maximum ratio over n random fields. Used for the proof-intermediate Korn
/// inequalities that are not exposed as eigenproblems.
double sampled_ratio(const std::function<double(const Eigen::VectorXd&)>& lhs,
                     const std::function<double(const Eigen::VectorXd&)>& rhs, int dim,
                     int n_samples, std::uint64_t seed);

}  // namespace hypokin
