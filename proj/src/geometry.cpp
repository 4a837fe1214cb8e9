#include "hypokin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "json.hpp"

namespace hypokin {

namespace {

constexpr double kPi = std::numbers::pi;

double circ_dist(double a, double b) {
  double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

double AlphaProfile::eval(double s) const {
  s -= std::floor(s);
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Piecewise: {
      if (breaks.empty() || breaks.size() != values.size())
        throw std::invalid_argument("piecewise alpha profile: breaks/values mismatch");
      std::size_t seg = 0;
      for (std::size_t i = 0; i < breaks.size(); ++i)
        if (s >= breaks[i]) seg = i;
      return values[seg];
    }
    case Kind::Bump: {
      double d = circ_dist(s, center) / width;
      double a = low + (high - low) * std::exp(-0.5 * d * d);
      return std::clamp(a, 0.0, 1.0);
    }
  }
  return value;
}

bool AlphaProfile::is_zero() const {
  switch (kind) {
    case Kind::Constant:
      return value == 0.0;
    case Kind::Piecewise:
      return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    case Kind::Bump:
      return low == 0.0 && high == 0.0;
  }
  return false;
}

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

struct RawMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
};

void check_alpha_range(double a) {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::invalid_argument("accommodation coefficient outside [0,1]");
}

// Fills areas, centroids, edge topology, boundary loops and arclengths.
// Boundary alpha samples are taken from `profile` when given, otherwise from
// `carry` (vertex-pair keyed), so normalization preserves physical samples.
void finalize(Mesh& mesh, const AlphaProfile* profile,
              const std::map<std::pair<int, int>, double>* carry) {
  const int nc = mesh.n_cells();
  mesh.cell_areas.assign(nc, 0.0);
  mesh.cell_centroids.assign(nc, Vec2::Zero());
  mesh.cell_edges.assign(nc, {});
  mesh.interior_edges.clear();
  mesh.boundary_edges.clear();

  mesh.total_area = 0.0;
  Vec2 first_moment = Vec2::Zero();
  for (int c = 0; c < nc; ++c) {
    auto& t = mesh.triangles[c];
    double a = signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (a < 0) {  // enforce CCW storage
      std::swap(t[1], t[2]);
      a = -a;
    }
    if (!(a > 0)) throw std::runtime_error("degenerate triangle in mesh");
    mesh.cell_areas[c] = a;
    Vec2 ctr = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
    mesh.cell_centroids[c] = ctr;
    mesh.total_area += a;
    first_moment += a * ctr;
  }
  mesh.centroid = first_moment / mesh.total_area;

  // Edge map: sorted vertex pair -> (cell, oriented tail, oriented head).
  struct Inc {
    int cell, a, b;
  };
  std::map<std::pair<int, int>, std::vector<Inc>> edges;
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.triangles[c];
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({c, a, b});
    }
  }

  mesh.h_max = 0.0;
  for (auto& [key, inc] : edges) {
    const Vec2& pa = mesh.vertices[inc[0].a];
    const Vec2& pb = mesh.vertices[inc[0].b];
    Vec2 d = pb - pa;
    double len = d.norm();
    mesh.h_max = std::max(mesh.h_max, len);
    Vec2 n(d.y() / len, -d.x() / len);  // outward of the first incident cell
    if (inc.size() == 2) {
      InteriorEdge ie;
      ie.v0 = inc[0].a;
      ie.v1 = inc[0].b;
      ie.cell_left = inc[0].cell;
      ie.cell_right = inc[1].cell;
      ie.normal = n;
      ie.length = len;
      int id = static_cast<int>(mesh.interior_edges.size());
      mesh.interior_edges.push_back(ie);
      mesh.cell_edges[ie.cell_left].push_back({id, false, +1.0});
      mesh.cell_edges[ie.cell_right].push_back({id, false, -1.0});
    } else if (inc.size() == 1) {
      BoundaryEdge be;
      be.v0 = inc[0].a;
      be.v1 = inc[0].b;
      be.cell = inc[0].cell;
      be.normal = n;
      be.midpoint = 0.5 * (pa + pb);
      be.length = len;
      int id = static_cast<int>(mesh.boundary_edges.size());
      mesh.boundary_edges.push_back(be);
      mesh.cell_edges[inc[0].cell].push_back({id, true, +1.0});
    } else {
      throw std::runtime_error("non-manifold edge in mesh");
    }
  }

  // Boundary loops and arclength parametrization.
  std::map<int, int> next_from;  // tail vertex -> boundary edge id
  for (int i = 0; i < static_cast<int>(mesh.boundary_edges.size()); ++i)
    next_from[mesh.boundary_edges[i].v0] = i;
  std::vector<bool> seen(mesh.boundary_edges.size(), false);
  mesh.boundary_length = 0.0;
  int loop_id = 0;
  for (int start = 0; start < static_cast<int>(mesh.boundary_edges.size()); ++start) {
    if (seen[start]) continue;
    std::vector<int> loop;
    int e = start;
    while (!seen[e]) {
      seen[e] = true;
      loop.push_back(e);
      auto it = next_from.find(mesh.boundary_edges[e].v1);
      if (it == next_from.end()) throw std::runtime_error("open boundary loop");
      e = it->second;
    }
    double s = 0.0;
    for (int id : loop) {
      auto& be = mesh.boundary_edges[id];
      be.loop = loop_id;
      be.arc_mid = s + 0.5 * be.length;
      s += be.length;
    }
    for (int id : loop) mesh.boundary_edges[id].loop_length = s;
    mesh.boundary_length += s;
    ++loop_id;
  }

  for (auto& be : mesh.boundary_edges) {
    if (profile) {
      be.alpha = profile->eval(be.arc_mid / be.loop_length);
    } else if (carry) {
      auto it = carry->find({std::min(be.v0, be.v1), std::max(be.v0, be.v1)});
      if (it == carry->end()) throw std::runtime_error("boundary alpha carry-over failed");
      be.alpha = it->second;
    }
    check_alpha_range(be.alpha);
  }

  mesh.h_min = std::numeric_limits<double>::max();
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.triangles[c];
    double p = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).norm() +
               (mesh.vertices[t[2]] - mesh.vertices[t[1]]).norm() +
               (mesh.vertices[t[0]] - mesh.vertices[t[2]]).norm();
    mesh.h_min = std::min(mesh.h_min, 2.0 * mesh.cell_areas[c] / p);
  }
}

RawMesh square_grid(double h) {
  const int n = std::max(1, static_cast<int>(std::lround(1.0 / h)));
  RawMesh rm;
  auto vid = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      rm.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      rm.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      rm.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return rm;
}

// Ring vertex at angle 2*pi*j/m, generated mirror-exact about the x axis so
// that reflective symmetry of the mesh holds to the last bit.
Vec2 ring_vertex(double r, int j, int m) {
  j = ((j % m) + m) % m;
  if (j == 0) return Vec2(r, 0.0);
  if (2 * j == m) return Vec2(-r, 0.0);
  if (2 * j < m) {
    double a = 2.0 * kPi * j / m;
    return Vec2(r * std::cos(a), r * std::sin(a));
  }
  Vec2 p = ring_vertex(r, m - j, m);
  return Vec2(p.x(), -p.y());
}

RawMesh disk_rings(double h) {
  const int nr = std::max(1, static_cast<int>(std::lround(1.0 / h)));
  RawMesh rm;
  rm.vertices.emplace_back(0.0, 0.0);
  std::vector<int> ring_start(nr + 1, 0);
  for (int k = 1; k <= nr; ++k) {
    ring_start[k] = static_cast<int>(rm.vertices.size());
    const int m = 6 * k;
    const double r = static_cast<double>(k) / nr;
    for (int j = 0; j < m; ++j) rm.vertices.push_back(ring_vertex(r, j, m));
  }
  // Center fan.
  for (int j = 0; j < 6; ++j)
    rm.triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
  // Bands, stitched sector by sector; the per-sector merge is palindromic, so
  // the triangulation is symmetric under reflection about the x axis.
  for (int k = 2; k <= nr; ++k) {
    const int mi = 6 * (k - 1), mo = 6 * k;
    const int bi = ring_start[k - 1], bo = ring_start[k];
    for (int s = 0; s < 6; ++s) {
      const int i0 = s * (k - 1), j0 = s * k;
      int il = 0, jl = 0;
      while (il < k - 1 || jl < k) {
        bool adv_inner;
        if (il >= k - 1)
          adv_inner = false;
        else if (jl >= k)
          adv_inner = true;
        else
          adv_inner = static_cast<double>(il + 1) / (k - 1) < static_cast<double>(jl + 1) / k;
        int vi = bi + (i0 + il) % mi;
        int vo = bo + (j0 + jl) % mo;
        if (adv_inner) {
          rm.triangles.push_back({vi, vo, bi + (i0 + il + 1) % mi});
          ++il;
        } else {
          rm.triangles.push_back({vi, vo, bo + (j0 + jl + 1) % mo});
          ++jl;
        }
      }
    }
  }
  return rm;
}

RawMesh annulus_rings(double r_inner, double h) {
  if (!(r_inner > 0.0 && r_inner < 1.0))
    throw std::invalid_argument("annulus requires 0 < r_inner < outer radius (= 1)");
  const int nr = std::max(1, static_cast<int>(std::lround((1.0 - r_inner) / h)));
  const double r_mid = 0.5 * (1.0 + r_inner);
  int m = std::max(8, static_cast<int>(std::lround(2.0 * kPi * r_mid / h)));
  if (m % 2) ++m;  // even count keeps the mesh mirror-symmetric
  RawMesh rm;
  for (int k = 0; k <= nr; ++k) {
    double r = r_inner + (1.0 - r_inner) * k / nr;
    for (int j = 0; j < m; ++j) rm.vertices.push_back(ring_vertex(r, j, m));
  }
  auto vid = [m](int k, int j) { return k * m + ((j % m) + m) % m; };
  for (int k = 0; k < nr; ++k)
    for (int j = 0; j < m; ++j) {
      // Alternate the quad diagonal between the half-planes so reflection
      // about the x axis maps triangles to triangles.
      if (2 * j < m) {
        rm.triangles.push_back({vid(k, j), vid(k + 1, j), vid(k + 1, j + 1)});
        rm.triangles.push_back({vid(k, j), vid(k + 1, j + 1), vid(k, j + 1)});
      } else {
        rm.triangles.push_back({vid(k, j), vid(k + 1, j), vid(k, j + 1)});
        rm.triangles.push_back({vid(k + 1, j), vid(k + 1, j + 1), vid(k, j + 1)});
      }
    }
  return rm;
}

// Closed-triangle test: points on an edge count as inside, so an ear whose
// diagonal passes through another polygon vertex is never clipped (that would
// leave a T-junction).
bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  double tol = 1e-12 * std::abs(signed_area(a, b, c));
  double d1 = signed_area(p, a, b);
  double d2 = signed_area(p, b, c);
  double d3 = signed_area(p, c, a);
  return d1 >= -tol && d2 >= -tol && d3 >= -tol;
}

RawMesh ear_clip(const std::vector<Vec2>& poly) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((poly[i] - poly[j]).norm() < 1e-14)
        throw std::invalid_argument("polygon has a repeated vertex");
  double area = 0;
  for (int i = 0; i < n; ++i) area += signed_area(Vec2::Zero(), poly[i], poly[(i + 1) % n]);
  if (!(area > 0)) throw std::invalid_argument("polygon must be positively oriented");

  RawMesh rm;
  rm.vertices = poly;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      int ip = idx[(i + idx.size() - 1) % idx.size()];
      int ic = idx[i];
      int in = idx[(i + 1) % idx.size()];
      if (signed_area(poly[ip], poly[ic], poly[in]) <= 1e-15) continue;
      bool ear = true;
      for (int other : idx) {
        if (other == ip || other == ic || other == in) continue;
        if (point_in_triangle(poly[other], poly[ip], poly[ic], poly[in])) {
          ear = false;
          break;
        }
      }
      if (ear) {
        rm.triangles.push_back({ip, ic, in});
        idx.erase(idx.begin() + i);
        clipped = true;
        break;
      }
    }
    if (!clipped) throw std::invalid_argument("polygon is not simple (ear clipping failed)");
  }
  rm.triangles.push_back({idx[0], idx[1], idx[2]});
  return rm;
}

void refine4(RawMesh& rm) {
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(rm.vertices.size());
    rm.vertices.push_back(0.5 * (rm.vertices[a] + rm.vertices[b]));
    midpoint[key] = id;
    return id;
  };
  std::vector<std::array<int, 3>> out;
  out.reserve(4 * rm.triangles.size());
  for (const auto& t : rm.triangles) {
    int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    out.push_back({t[0], m01, m20});
    out.push_back({t[1], m12, m01});
    out.push_back({t[2], m20, m12});
    out.push_back({m01, m12, m20});
  }
  rm.triangles = std::move(out);
}

double max_edge(const RawMesh& rm) {
  double h = 0;
  for (const auto& t : rm.triangles)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (rm.vertices[t[e]] - rm.vertices[t[(e + 1) % 3]]).norm());
  return h;
}

}  // namespace

Mesh build_mesh(const DomainSpec& spec, double target_edge_length) {
  if (!(target_edge_length > 0)) throw std::invalid_argument("target edge length must be positive");
  RawMesh rm;
  switch (spec.shape) {
    case DomainSpec::Shape::UnitSquare:
      rm = square_grid(target_edge_length);
      break;
    case DomainSpec::Shape::Disk:
      rm = disk_rings(target_edge_length);
      break;
    case DomainSpec::Shape::Annulus:
      rm = annulus_rings(spec.r_inner, target_edge_length);
      break;
    case DomainSpec::Shape::LShape: {
      std::vector<Vec2> L = {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}};
      rm = ear_clip(L);
      while (max_edge(rm) > target_edge_length) refine4(rm);
      break;
    }
    case DomainSpec::Shape::Polygon: {
      rm = ear_clip(spec.polygon);
      while (max_edge(rm) > target_edge_length) refine4(rm);
      break;
    }
  }
  Mesh mesh;
  mesh.vertices = std::move(rm.vertices);
  mesh.triangles = std::move(rm.triangles);
  finalize(mesh, &spec.alpha, nullptr);
  return mesh;
}

Mesh normalize_domain(const Mesh& mesh) {
  std::map<std::pair<int, int>, double> carry;
  for (const auto& be : mesh.boundary_edges)
    carry[{std::min(be.v0, be.v1), std::max(be.v0, be.v1)}] = be.alpha;
  Mesh out;
  out.triangles = mesh.triangles;
  const double s = 1.0 / std::sqrt(mesh.total_area);
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back((v - mesh.centroid) * s);
  finalize(out, nullptr, &carry);
  return out;
}

RigidFieldBasis rigid_fields(const Mesh& mesh, double tol) {
  RigidFieldBasis rb;
  rb.tolerance_used = tol;
  Eigen::Matrix2d J;
  J << 0, -1, 1, 0;
  J /= std::sqrt(2.0);
  double worst = 0;
  for (const auto& be : mesh.boundary_edges)
    worst = std::max(worst, std::abs((J * be.midpoint).dot(be.normal)));
  if (worst <= tol) rb.basis.push_back(J);
  return rb;
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : mesh.vertices) j["vertices"].push_back({v.x(), v.y()});
  j["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) j["triangles"].push_back({t[0], t[1], t[2]});
  j["boundary"] = nlohmann::json::array();
  for (const auto& be : mesh.boundary_edges) {
    nlohmann::json e;
    e["v"] = {be.v0, be.v1};
    e["n"] = {be.normal.x(), be.normal.y()};
    e["alpha"] = be.alpha;
    j["boundary"].push_back(e);
  }
  return j.dump(2);
}

Mesh mesh_from_json(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  Mesh mesh;
  for (const auto& v : j.at("vertices")) mesh.vertices.emplace_back(v.at(0), v.at(1));
  for (const auto& t : j.at("triangles"))
    mesh.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  std::map<std::pair<int, int>, double> carry;
  std::map<std::pair<int, int>, Vec2> normals;
  for (const auto& e : j.at("boundary")) {
    int a = e.at("v").at(0), b = e.at("v").at(1);
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    carry[key] = e.at("alpha");
    normals[key] = Vec2(e.at("n").at(0), e.at("n").at(1));
  }
  finalize(mesh, nullptr, &carry);
  for (auto& be : mesh.boundary_edges) {
    auto it = normals.find({std::min(be.v0, be.v1), std::max(be.v0, be.v1)});
    if (it != normals.end()) be.normal = it->second;
  }
  return mesh;
}

}  // namespace hypokin
