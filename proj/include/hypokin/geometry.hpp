#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypokin {

using Vec2 = Eigen::Vector2d;

/// Accommodation-coefficient profile along a boundary loop, parametrized by
/// normalized arclength s in [0,1).
struct AlphaProfile {
  enum class Kind { Constant, Piecewise, Bump };
  Kind kind = Kind::Constant;
  double value = 1.0;
  // Piecewise: value values[i] on [breaks[i], breaks[i+1]), breaks[0] == 0.
  std::vector<double> breaks;
  std::vector<double> values;
  // Bump: low + (high-low)*exp(-((s-center)/width)^2/2), circular distance.
  double center = 0.5, width = 0.1, low = 0.0, high = 1.0;

  double eval(double s) const;
  bool is_zero() const;

  static AlphaProfile constant(double a) {
    AlphaProfile p;
    p.kind = Kind::Constant;
    p.value = a;
    return p;
  }
};

struct DomainSpec {
  enum class Shape { UnitSquare, Disk, Annulus, LShape, Polygon };
  Shape shape = Shape::UnitSquare;
  double r_inner = 0.5;                // annulus only (outer radius is 1)
  std::vector<Vec2> polygon;           // Polygon only; simple, CCW
  AlphaProfile alpha;
};

struct BoundaryEdge {
  int v0 = -1, v1 = -1;  // oriented so the domain lies to the left
  int cell = -1;         // adjacent triangle
  Vec2 normal;           // outward unit normal at the edge midpoint
  Vec2 midpoint;
  double length = 0;
  int loop = 0;          // boundary loop id
  double arc_mid = 0;    // arclength of the midpoint within its loop
  double loop_length = 0;
  double alpha = 0;      // accommodation sample at the midpoint
};

struct InteriorEdge {
  int v0 = -1, v1 = -1;
  int cell_left = -1, cell_right = -1;  // normal points left -> right
  Vec2 normal;
  double length = 0;
};

struct CellEdgeRef {
  int id = -1;
  bool boundary = false;
  double sign = 1.0;  // +1 when the stored normal points out of this cell
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<double> cell_areas;
  std::vector<Vec2> cell_centroids;
  std::vector<InteriorEdge> interior_edges;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::vector<CellEdgeRef>> cell_edges;
  double total_area = 0;
  Vec2 centroid = Vec2::Zero();
  double boundary_length = 0;
  double h_min = 0;  // smallest cell inradius
  double h_max = 0;  // largest edge length

  int n_cells() const { return static_cast<int>(triangles.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
};

/// Basis of the centered infinitesimal rigid displacement fields tangent to
/// the boundary. In 2-D it is empty or the single normalized rotation
/// generator J/sqrt(2), J = [[0,-1],[1,0]].
struct RigidFieldBasis {
  std::vector<Eigen::Matrix2d> basis;
  double tolerance_used = 0;
  bool empty() const { return basis.empty(); }
};

Mesh build_mesh(const DomainSpec& spec, double target_edge_length);
Mesh normalize_domain(const Mesh& mesh);
RigidFieldBasis rigid_fields(const Mesh& mesh, double tol);

std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& json_text);

}  // namespace hypokin
