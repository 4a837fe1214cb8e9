#include <cmath>

#include "doctest.h"
#include "hypokin/rng.hpp"
#include "hypokin/velocity.hpp"

using namespace hypokin;

namespace {

// Gaussian moment oracle for the standard normal in d = 2:
//   E 1 = 1, E v_i^2 = 1, E |v|^2 = 2, E v_i^4 = 3, E v_1^2 v_2^2 = 1,
//   E |v|^4 = d(d+2) = 8.
double weighted_sum(const VelocityGrid& g, const std::function<double(Vec2)>& poly) {
  double s = 0;
  for (int k = 0; k < g.nv; ++k) s += g.w_mu(k) * poly(g.nodes[k]);
  return s;
}

}  // namespace

TEST_CASE("Gaussian moments are exact at n=6 and n=8") {
  for (int n : {6, 8}) {
    VelocityGrid g = gauss_hermite_grid(n);
    CHECK(std::abs(weighted_sum(g, [](Vec2) { return 1.0; }) - 1.0) < 1e-12);
    CHECK(std::abs(weighted_sum(g, [](Vec2 v) { return v.x(); })) < 1e-13);
    CHECK(std::abs(weighted_sum(g, [](Vec2 v) { return v.squaredNorm(); }) - 2.0) < 1e-12);
    CHECK(std::abs(weighted_sum(g, [](Vec2 v) {
            return v.squaredNorm() * v.squaredNorm();
          }) - 8.0) < 1e-12);
  }
  VelocityGrid g8 = gauss_hermite_grid(8);
  CHECK(std::abs(weighted_sum(g8, [](Vec2 v) {
          return v.x() * v.x() * v.y() * v.y();
        }) - 1.0) < 1e-12);
  // Degree-8 exactness backs the A3 checks: E v_1^8 = 105.
  CHECK(std::abs(weighted_sum(g8, [](Vec2 v) { return std::pow(v.x(), 8); }) - 105.0) < 2e-11);
}

TEST_CASE("small grids are rejected") { CHECK_THROWS(gauss_hermite_grid(5)); }

TEST_CASE("grid is symmetric under sign flip and coordinate swap") {
  VelocityGrid g = gauss_hermite_grid(7);
  const int n = g.n_per_axis;
  for (int i = 0; i < n; ++i) {
    CHECK(g.nodes_1d(i) == -g.nodes_1d(n - 1 - i));  // bit-exact
    CHECK(g.weights_1d(i) == g.weights_1d(n - 1 - i));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(g.w(g.idx(i, j)) == g.w(g.idx(j, i)));
      CHECK(g.mu(g.idx(i, j)) == g.mu(g.idx(j, i)));
    }
}

TEST_CASE("projector fixes kernel elements") {
  VelocityGrid g = gauss_hermite_grid(6);
  Eigen::VectorXd mu = g.mu;
  CHECK((project_pi(g, mu) - mu).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::VectorXd v1mu(g.nv);
  for (int k = 0; k < g.nv; ++k) v1mu(k) = g.nodes[k].x() * g.mu(k);
  CHECK((project_pi(g, v1mu) - v1mu).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::VectorXd e2mu(g.nv);
  for (int k = 0; k < g.nv; ++k) e2mu(k) = g.nodes[k].squaredNorm() * g.mu(k);
  CHECK((project_pi(g, e2mu) - e2mu).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("projector is idempotent and orthogonal on random data") {
  VelocityGrid g = gauss_hermite_grid(8);
  auto gen = substream(7, "test.velocity");
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd f(g.nv);
    for (int k = 0; k < g.nv; ++k) f(k) = nd(gen) * g.mu(k);
    Eigen::VectorXd pf = project_pi(g, f);
    CHECK((project_pi(g, pf) - pf).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::VectorXd fperp = f - pf;
    CHECK(std::abs(g.dot_v(fperp, pf)) < 1e-12);
    // Orthogonality against each kernel basis element.
    for (int mode = 0; mode < 4; ++mode) {
      Eigen::VectorXd b(g.nv);
      for (int k = 0; k < g.nv; ++k) {
        const Vec2& v = g.nodes[k];
        double coef = mode == 0 ? 1.0 : mode == 1 ? v.x() : mode == 2 ? v.y() : v.squaredNorm();
        b(k) = coef * g.mu(k);
      }
      CHECK(std::abs(g.dot_v(fperp, b)) < 1e-12);
    }
    // Parseval split.
    double lhs = g.dot_v(f, f);
    double rhs = g.dot_v(pf, pf) + g.dot_v(fperp, fperp);
    CHECK(std::abs(lhs - rhs) < 1e-12 * lhs);
  }
}

TEST_CASE("moments of canonical states") {
  VelocityGrid g = gauss_hermite_grid(6);
  Eigen::MatrixXd vals(3, g.nv);
  for (int k = 0; k < g.nv; ++k) {
    vals(0, k) = g.mu(k);
    vals(1, k) = g.nodes[k].squaredNorm() * g.mu(k);
    vals(2, k) = g.nodes[k].x() * g.mu(k);
  }
  MacroFields mf = moments(g, vals);
  CHECK(mf.rho(0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mf.m.row(0).norm() < 1e-13);
  CHECK(std::abs(mf.theta(0)) < 1e-13);
  // f = |v|^2 mu: theta = (E|v|^4 - d E|v|^2)/sqrt(2d) = (8 - 4)/2 = 2.
  CHECK(mf.theta(1) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(mf.m(2, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(mf.m(2, 1)) < 1e-13);
}

TEST_CASE("moment functionals: kernel inputs") {
  VelocityGrid g = gauss_hermite_grid(8);
  Eigen::MatrixXd vals(3, g.nv);
  for (int k = 0; k < g.nv; ++k) {
    vals(0, k) = g.energy_mode(k) * g.mu(k);  // theta-hat = 1
    vals(1, k) = g.mu(k);
    vals(2, k) = g.nodes[k].y() * g.mu(k);
  }
  MomentFields mm = moment_fields(g, vals);
  // Mq[e mu] = sqrt(2/d) I = I for d = 2.
  CHECK(mm.Mq(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(mm.Mq(0, 1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(mm.Mq(0, 2)) < 1e-13);
  // Mp vanishes on mu and v_k mu.
  CHECK(mm.Mp.row(1).norm() < 1e-13);
  CHECK(mm.Mp.row(2).norm() < 1e-13);
}

TEST_CASE("Mp and Mq see only the microscopic part") {
  VelocityGrid g = gauss_hermite_grid(8);
  auto gen = substream(21, "test.velocity.mpq");
  std::normal_distribution<double> nd;
  Eigen::MatrixXd f(1, g.nv), fperp(1, g.nv);
  for (int k = 0; k < g.nv; ++k) f(0, k) = nd(gen) * g.mu(k);
  Eigen::VectorXd p = project_pi(g, f.row(0).transpose());
  fperp.row(0) = f.row(0) - p.transpose();

  MomentFields a = moment_fields(g, f), b = moment_fields(g, fperp);
  CHECK((a.Mp - b.Mp).cwiseAbs().maxCoeff() < 1e-12);

  MacroFields mf = moments(g, f);
  // Mq[f] - sqrt(2/d) theta I = Mq[f_perp]
  CHECK(std::abs(a.Mq(0, 0) - mf.theta(0) - b.Mq(0, 0)) < 1e-12);
  CHECK(std::abs(a.Mq(0, 1) - mf.theta(0) - b.Mq(0, 1)) < 1e-12);
  CHECK(std::abs(a.Mq(0, 2) - b.Mq(0, 2)) < 1e-12);

  // pi f leaves Mp exactly: Mp[pi f] = 0.
  Eigen::MatrixXd pf(1, g.nv);
  pf.row(0) = p.transpose();
  CHECK(moment_fields(g, pf).Mp.row(0).norm() < 1e-12);
}
