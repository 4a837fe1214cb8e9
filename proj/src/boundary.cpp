#include "hypokin/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hypokin {

namespace {

constexpr double kDirTol = 1e-14;   // |v.n| below this carries no flux
constexpr double kNodeTol = 1e-12;  // exact-node match tolerance for R_x v

// Bracketing 1-D interval for coordinate c; returns (lo index, weight of hi).
// Clamped at the grid hull: reflected tail nodes may fall outside.
std::pair<int, double> bracket(const Eigen::VectorXd& x, double c) {
  const int n = static_cast<int>(x.size());
  if (c <= x(0)) return {0, 0.0};
  if (c >= x(n - 1)) return {n - 2, 1.0};
  int lo = 0;
  while (lo + 1 < n - 1 && x(lo + 1) <= c) ++lo;
  return {lo, (c - x(lo)) / (x(lo + 1) - x(lo))};
}

}  // namespace

BoundaryOperator::BoundaryOperator(const Mesh& mesh, const VelocityGrid& grid) : grid_(&grid) {
  edges_.resize(mesh.boundary_edges.size());
  const int n1 = grid.n_per_axis;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const BoundaryEdge& be = mesh.boundary_edges[e];
    BoundaryEdgeOp& op = edges_[e];
    op.alpha = be.alpha;
    op.normal = be.normal;
    op.length = be.length;

    for (int k = 0; k < grid.nv; ++k) {
      double vn = grid.nodes[k].dot(op.normal);
      if (vn > kDirTol)
        op.out_nodes.push_back(k);
      else if (vn < -kDirTol)
        op.in_nodes.push_back(k);
    }
    if (op.out_nodes.empty() || op.in_nodes.empty())
      throw std::runtime_error("boundary edge with empty velocity half-space");

    double mu_flux_out = 0;
    for (int k : op.out_nodes)
      mu_flux_out += grid.w(k) * grid.mu(k) * grid.nodes[k].dot(op.normal);
    op.c_mu = 1.0 / mu_flux_out;
    double num_beta = 0;
    op.mu_flux_in = 0;
    for (int k : op.in_nodes) {
      double wmuvn = grid.w(k) * grid.mu(k) * std::abs(grid.nodes[k].dot(op.normal));
      op.mu_flux_in += wmuvn;
      num_beta += wmuvn * grid.nodes[k].squaredNorm();
    }
    op.beta = num_beta / op.mu_flux_in;
    op.energy_mode_flux = 0;
    for (int k : op.in_nodes) {
      double wmuvn = grid.w(k) * grid.mu(k) * std::abs(grid.nodes[k].dot(op.normal));
      double e2 = grid.nodes[k].squaredNorm();
      op.energy_mode_flux += wmuvn * e2 * (e2 - op.beta);
    }

    // Specular stencil on h = g/mu: exact node match when R_x v is a grid
    // node, otherwise bilinear over the 4 bracketing nodes restricted to the
    // outgoing half-space and renormalized.
    std::vector<char> is_out(grid.nv, 0);
    for (int k : op.out_nodes) is_out[k] = 1;
    op.specular.reserve(op.in_nodes.size());
    for (int k : op.in_nodes) {
      Vec2 v = grid.nodes[k];
      Vec2 rv = v - 2.0 * op.normal * op.normal.dot(v);
      SpecularRow row;
      row.in_node = k;

      auto [i0, tx] = bracket(grid.nodes_1d, rv.x());
      auto [j0, ty] = bracket(grid.nodes_1d, rv.y());

      // Exact hit?
      int ei = -1, ej = -1;
      if (std::abs(grid.nodes_1d(i0) - rv.x()) < kNodeTol) ei = i0;
      if (std::abs(grid.nodes_1d(i0 + 1) - rv.x()) < kNodeTol) ei = i0 + 1;
      if (std::abs(grid.nodes_1d(j0) - rv.y()) < kNodeTol) ej = j0;
      if (std::abs(grid.nodes_1d(j0 + 1) - rv.y()) < kNodeTol) ej = j0 + 1;
      if (ei >= 0 && ej >= 0 && is_out[grid.idx(ei, ej)]) {
        row.n_terms = 1;
        row.cols[0] = grid.idx(ei, ej);
        row.wts[0] = 1.0;
        op.specular.push_back(row);
        continue;
      }

      const std::array<std::pair<int, int>, 4> corners = {
          std::pair{i0, j0}, {i0 + 1, j0}, {i0, j0 + 1}, {i0 + 1, j0 + 1}};
      const std::array<double, 4> bw = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty,
                                        tx * ty};
      double total = 0;
      for (int c = 0; c < 4; ++c) {
        int col = grid.idx(corners[c].first, corners[c].second);
        if (!is_out[col] || bw[c] == 0.0) continue;
        row.cols[row.n_terms] = col;
        row.wts[row.n_terms] = bw[c];
        total += bw[c];
        ++row.n_terms;
      }
      if (row.n_terms == 0) {
        // Reflected point surrounded by non-outgoing nodes: fall back to the
        // nearest outgoing node.
        int best = op.out_nodes[0];
        double bestd = std::numeric_limits<double>::max();
        for (int c : op.out_nodes) {
          double d = (grid.nodes[c] - rv).squaredNorm();
          if (d < bestd) {
            bestd = d;
            best = c;
          }
        }
        row.n_terms = 1;
        row.cols[0] = best;
        row.wts[0] = 1.0;
      } else {
        for (int c = 0; c < row.n_terms; ++c) row.wts[c] /= total;
      }
      op.specular.push_back(row);
    }
  }
}

Eigen::VectorXd BoundaryOperator::outgoing_trace(int edge_id,
                                                 const Eigen::VectorXd& cell_values) const {
  const BoundaryEdgeOp& op = edges_[edge_id];
  Eigen::VectorXd g(op.out_nodes.size());
  for (std::size_t i = 0; i < op.out_nodes.size(); ++i) g(i) = cell_values(op.out_nodes[i]);
  return g;
}

Eigen::VectorXd BoundaryOperator::diffusive_apply(int edge_id,
                                                  const Eigen::VectorXd& g_out) const {
  const BoundaryEdgeOp& op = edges_[edge_id];
  const VelocityGrid& g = *grid_;
  double flux = 0;
  for (std::size_t i = 0; i < op.out_nodes.size(); ++i) {
    int k = op.out_nodes[i];
    flux += g.w(k) * g_out(i) * g.nodes[k].dot(op.normal);
  }
  Eigen::VectorXd out(op.in_nodes.size());
  for (std::size_t i = 0; i < op.in_nodes.size(); ++i) {
    int k = op.in_nodes[i];
    out(i) = op.c_mu * g.mu(k) * flux;
  }
  return out;
}

ReflectResult BoundaryOperator::maxwell_reflect(int edge_id, const Eigen::VectorXd& g_out) const {
  const BoundaryEdgeOp& op = edges_[edge_id];
  const VelocityGrid& g = *grid_;
  ReflectResult res;
  res.g_in.resize(op.in_nodes.size());

  double flux_out_mass = 0, flux_out_energy = 0;
  double diff_flux = 0;
  for (std::size_t i = 0; i < op.out_nodes.size(); ++i) {
    int k = op.out_nodes[i];
    double wvn = g.w(k) * g.nodes[k].dot(op.normal);
    flux_out_mass += wvn * g_out(i);
    flux_out_energy += wvn * g.nodes[k].squaredNorm() * g_out(i);
    diff_flux += wvn * g_out(i);
  }

  // Map outgoing values to h = g/mu for the specular stencil.
  for (std::size_t i = 0; i < op.in_nodes.size(); ++i) {
    const SpecularRow& row = op.specular[i];
    double h = 0;
    for (int c = 0; c < row.n_terms; ++c) {
      // locate g_out index of node cols[c]
      // out_nodes is sorted ascending by construction
      auto it = std::lower_bound(op.out_nodes.begin(), op.out_nodes.end(), row.cols[c]);
      std::size_t pos = static_cast<std::size_t>(it - op.out_nodes.begin());
      h += row.wts[c] * g_out(pos) / g.mu(row.cols[c]);
    }
    int k = op.in_nodes[i];
    double spec = g.mu(k) * h;
    double diff = op.c_mu * g.mu(k) * diff_flux;
    res.g_in(i) = (1.0 - op.alpha) * spec + op.alpha * diff;
  }

  // Flux correction: zero mass flux always; zero energy flux for alpha == 0.
  double flux_in_mass = 0, flux_in_energy = 0;
  for (std::size_t i = 0; i < op.in_nodes.size(); ++i) {
    int k = op.in_nodes[i];
    double wvn = g.w(k) * std::abs(g.nodes[k].dot(op.normal));
    flux_in_mass += wvn * res.g_in(i);
    flux_in_energy += wvn * g.nodes[k].squaredNorm() * res.g_in(i);
  }
  res.c0 = (flux_out_mass - flux_in_mass) / op.mu_flux_in;
  if (op.alpha == 0.0) {
    // After the c0 mode, fix the energy flux with the mass-flux-free mode.
    double e_after_c0 = flux_in_energy + res.c0 * op.beta * op.mu_flux_in;
    res.c2 = (flux_out_energy - e_after_c0) / op.energy_mode_flux;
  }
  for (std::size_t i = 0; i < op.in_nodes.size(); ++i) {
    int k = op.in_nodes[i];
    double e2 = g.nodes[k].squaredNorm();
    res.g_in(i) += (res.c0 + res.c2 * (e2 - op.beta)) * g.mu(k);
  }
  return res;
}

double BoundaryOperator::dperp_boundary_norm(const VelocityGrid& grid, const Mesh& mesh,
                                             const Eigen::MatrixXd& values) const {
  double total = 0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const BoundaryEdgeOp& op = edges_[e];
    double aw = op.alpha * (2.0 - op.alpha);
    if (aw == 0.0) continue;
    const BoundaryEdge& be = mesh.boundary_edges[e];
    Eigen::VectorXd g_out = outgoing_trace(static_cast<int>(e), values.row(be.cell));
    double flux = 0;
    for (std::size_t i = 0; i < op.out_nodes.size(); ++i) {
      int k = op.out_nodes[i];
      flux += grid.w(k) * g_out(i) * grid.nodes[k].dot(op.normal);
    }
    double acc = 0;
    for (std::size_t i = 0; i < op.out_nodes.size(); ++i) {
      int k = op.out_nodes[i];
      double dperp = g_out(i) - op.c_mu * grid.mu(k) * flux;
      acc += grid.w_over_mu(k) * grid.nodes[k].dot(op.normal) * dperp * dperp;
    }
    total += be.length * aw * acc;
  }
  return total;
}

}  // namespace hypokin
