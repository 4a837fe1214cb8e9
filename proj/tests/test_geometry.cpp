#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "hypokin/geometry.hpp"

using namespace hypokin;

namespace {

DomainSpec square_spec(double alpha = 1.0) {
  DomainSpec s;
  s.shape = DomainSpec::Shape::UnitSquare;
  s.alpha = AlphaProfile::constant(alpha);
  return s;
}

DomainSpec disk_spec(double alpha = 1.0) {
  DomainSpec s;
  s.shape = DomainSpec::Shape::Disk;
  s.alpha = AlphaProfile::constant(alpha);
  return s;
}

}  // namespace

TEST_CASE("unit square at h=0.5: 2x2 quads, 8 triangles, boundary length 4") {
  Mesh m = build_mesh(square_spec(), 0.5);
  CHECK(m.n_cells() == 8);
  CHECK(m.boundary_length == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(m.total_area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("disk boundary normals are the analytic circle normals") {
  Mesh m = build_mesh(disk_spec(), 0.2);
  for (const auto& be : m.boundary_edges) {
    Vec2 analytic = be.midpoint / be.midpoint.norm();
    CHECK((be.normal - analytic).norm() < 1e-12);
    CHECK(std::abs(be.normal.norm() - 1.0) < 1e-13);
  }
}

TEST_CASE("degenerate inputs are rejected") {
  DomainSpec bad;
  bad.shape = DomainSpec::Shape::Polygon;
  bad.polygon = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS(build_mesh(bad, 0.3));

  DomainSpec ann;
  ann.shape = DomainSpec::Shape::Annulus;
  ann.r_inner = 1.5;
  CHECK_THROWS(build_mesh(ann, 0.1));

  CHECK_THROWS(build_mesh(square_spec(), -0.1));
}

TEST_CASE("normalize_domain: unit area, zero centroid, idempotent") {
  for (auto shape : {DomainSpec::Shape::UnitSquare, DomainSpec::Shape::Disk,
                     DomainSpec::Shape::LShape}) {
    DomainSpec s;
    s.shape = shape;
    s.alpha = AlphaProfile::constant(0.5);
    Mesh m = normalize_domain(build_mesh(s, 0.2));
    CHECK(std::abs(m.total_area - 1.0) < 1e-12);
    CHECK(m.centroid.norm() < 1e-12);

    Mesh again = normalize_domain(m);
    double drift = 0;
    for (int v = 0; v < m.n_vertices(); ++v)
      drift = std::max(drift, (m.vertices[v] - again.vertices[v]).norm());
    CHECK(drift < 1e-13);
  }
}

TEST_CASE("normalized square is the side-1 square centered at the origin") {
  Mesh m = normalize_domain(build_mesh(square_spec(), 0.25));
  double xmin = 1e30, xmax = -1e30;
  for (const auto& v : m.vertices) {
    xmin = std::min({xmin, v.x(), v.y()});
    xmax = std::max({xmax, v.x(), v.y()});
  }
  CHECK(xmin == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(xmax == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("normalized disk has radius 1/sqrt(pi)") {
  Mesh m = normalize_domain(build_mesh(disk_spec(), 0.2));
  double rmax = 0;
  for (const auto& be : m.boundary_edges)
    rmax = std::max(rmax, m.vertices[be.v0].norm());
  // Boundary vertices sit on the circle of the normalized radius; the total
  // area is that of the inscribed polygon, so allow the polygon defect.
  double expected = 1.0 / std::sqrt(std::numbers::pi);
  CHECK(rmax == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("divergence theorem: constant-field boundary flux vanishes") {
  for (auto shape : {DomainSpec::Shape::UnitSquare, DomainSpec::Shape::Disk,
                     DomainSpec::Shape::Annulus, DomainSpec::Shape::LShape}) {
    DomainSpec s;
    s.shape = shape;
    s.r_inner = 0.4;
    s.alpha = AlphaProfile::constant(0.0);
    Mesh m = normalize_domain(build_mesh(s, 0.15));
    for (Vec2 b : {Vec2(1, 0), Vec2(0, 1)}) {
      double flux = 0;
      for (const auto& be : m.boundary_edges) flux += b.dot(be.normal) * be.length;
      CHECK(std::abs(flux) < 1e-12);
    }
  }
}

TEST_CASE("per-cell edge normals close up") {
  Mesh m = normalize_domain(build_mesh(disk_spec(), 0.2));
  for (int c = 0; c < m.n_cells(); ++c) {
    Vec2 sum = Vec2::Zero();
    for (const auto& ref : m.cell_edges[c]) {
      if (ref.boundary)
        sum += ref.sign * m.boundary_edges[ref.id].length * m.boundary_edges[ref.id].normal;
      else
        sum += ref.sign * m.interior_edges[ref.id].length * m.interior_edges[ref.id].normal;
    }
    CHECK(sum.norm() < 1e-13);
  }
}

TEST_CASE("rigid fields: disk and annulus keep the rotation, square does not") {
  auto tol = [](const Mesh& m) { return 1e-10 * m.boundary_length; };

  Mesh disk = normalize_domain(build_mesh(disk_spec(), 0.2));
  CHECK(rigid_fields(disk, tol(disk)).basis.size() == 1);

  DomainSpec ann;
  ann.shape = DomainSpec::Shape::Annulus;
  ann.r_inner = 0.5;
  Mesh annm = normalize_domain(build_mesh(ann, 0.15));
  CHECK(rigid_fields(annm, tol(annm)).basis.size() == 1);

  Mesh sq = normalize_domain(build_mesh(square_spec(), 0.25));
  CHECK(rigid_fields(sq, tol(sq)).empty());

  // Frobenius-normalized basis element.
  auto basis = rigid_fields(disk, tol(disk)).basis;
  CHECK(basis[0].squaredNorm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rigid field detection is refinement-stable") {
  for (double h : {0.3, 0.15, 0.075}) {
    Mesh disk = normalize_domain(build_mesh(disk_spec(), h));
    CHECK(rigid_fields(disk, 1e-10 * disk.boundary_length).basis.size() == 1);
    Mesh sq = normalize_domain(build_mesh(square_spec(), h));
    CHECK(rigid_fields(sq, 1e-10 * sq.boundary_length).empty());
  }
}

TEST_CASE("alpha profiles sample onto boundary edges") {
  DomainSpec s = square_spec();
  s.alpha.kind = AlphaProfile::Kind::Bump;
  s.alpha.center = 0.5;
  s.alpha.width = 0.1;
  s.alpha.low = 0.2;
  s.alpha.high = 0.9;
  Mesh m = build_mesh(s, 0.1);
  double amin = 2, amax = -1;
  for (const auto& be : m.boundary_edges) {
    CHECK(be.alpha >= 0.0);
    CHECK(be.alpha <= 1.0);
    amin = std::min(amin, be.alpha);
    amax = std::max(amax, be.alpha);
  }
  CHECK(amax > 0.85);
  CHECK(amin < 0.25);

  AlphaProfile pw;
  pw.kind = AlphaProfile::Kind::Piecewise;
  pw.breaks = {0.0, 0.5};
  pw.values = {0.0, 1.0};
  CHECK(pw.eval(0.25) == 0.0);
  CHECK(pw.eval(0.75) == 1.0);
  CHECK_FALSE(pw.is_zero());
}

TEST_CASE("mesh JSON round trip preserves geometry, normals and alpha") {
  DomainSpec s = disk_spec(0.37);
  Mesh m = normalize_domain(build_mesh(s, 0.25));
  Mesh back = mesh_from_json(mesh_to_json(m));
  REQUIRE(back.n_cells() == m.n_cells());
  REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
  for (std::size_t e = 0; e < m.boundary_edges.size(); ++e) {
    CHECK(back.boundary_edges[e].alpha == m.boundary_edges[e].alpha);
    CHECK((back.boundary_edges[e].normal - m.boundary_edges[e].normal).norm() < 1e-15);
  }
  CHECK(back.total_area == doctest::Approx(m.total_area).epsilon(1e-14));
}

TEST_CASE("disk mesh is mirror symmetric about the x axis") {
  Mesh m = build_mesh(disk_spec(), 0.2);
  std::set<std::pair<double, double>> verts;
  for (const auto& v : m.vertices) verts.insert({v.x(), v.y()});
  for (const auto& v : m.vertices) CHECK(verts.count({v.x(), -v.y()}) == 1);
}
