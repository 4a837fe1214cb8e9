#include "hypokin/transport.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "hypokin/rng.hpp"

namespace hypokin {

TransportSolver::TransportSolver(const Mesh& mesh, const VelocityGrid& grid,
                                 const BoundaryOperator& bops)
    : mesh_(&mesh), grid_(&grid), bops_(&bops) {
  specular_walls_ = true;
  for (const auto& be : mesh.boundary_edges)
    if (be.alpha != 0.0) specular_walls_ = false;
  rigid_ = rigid_fields(mesh, 1e-10 * mesh.boundary_length);
}

Eigen::MatrixXd TransportSolver::apply_transport(const Eigen::MatrixXd& values,
                                                 double* correction_mag) const {
  const Mesh& mesh = *mesh_;
  const VelocityGrid& grid = *grid_;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(values.rows(), values.cols());

  for (const auto& ie : mesh.interior_edges) {
    const double lenL = ie.length / mesh.cell_areas[ie.cell_left];
    const double lenR = ie.length / mesh.cell_areas[ie.cell_right];
    for (int k = 0; k < grid.nv; ++k) {
      double vn = grid.nodes[k].dot(ie.normal);
      double up = vn > 0 ? values(ie.cell_left, k) : values(ie.cell_right, k);
      double f = vn * up;
      out(ie.cell_left, k) -= f * lenL;
      out(ie.cell_right, k) += f * lenR;
    }
  }

  double corr2 = 0;
  for (int e = 0; e < bops_->n_edges(); ++e) {
    const BoundaryEdge& be = mesh.boundary_edges[e];
    const BoundaryEdgeOp& op = bops_->edge(e);
    const double leninv = be.length / mesh.cell_areas[be.cell];
    Eigen::VectorXd g_out = bops_->outgoing_trace(e, values.row(be.cell));
    ReflectResult rr = bops_->maxwell_reflect(e, g_out);
    corr2 += be.length * (rr.c0 * rr.c0 + rr.c2 * rr.c2);
    for (std::size_t i = 0; i < op.out_nodes.size(); ++i) {
      int k = op.out_nodes[i];
      out(be.cell, k) -= grid.nodes[k].dot(op.normal) * g_out(i) * leninv;
    }
    for (std::size_t i = 0; i < op.in_nodes.size(); ++i) {
      int k = op.in_nodes[i];
      out(be.cell, k) -= grid.nodes[k].dot(op.normal) * rr.g_in(i) * leninv;
    }
  }
  if (correction_mag) *correction_mag = std::sqrt(corr2);
  return out;
}

Eigen::MatrixXd TransportSolver::apply_collision_all(const CollisionModel& model,
                                                     const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (int c = 0; c < values.rows(); ++c)
    out.row(c) = apply_collision(model, *grid_, values.row(c).transpose()).transpose();
  return out;
}

Eigen::MatrixXd TransportSolver::apply_generator(const CollisionModel& model,
                                                 const KineticState& state) const {
  const double eps = state.epsilon;
  return apply_transport(state.values) / eps +
         apply_collision_all(model, state.values) / (eps * eps);
}

double TransportSolver::max_dt(double cfl, double epsilon) const {
  return cfl * epsilon * mesh_->h_min / grid_->v_max;
}

KineticState TransportSolver::step(const KineticState& state, double dt,
                                   const CollisionModel& model, double* correction_mag) const {
  if (dt > max_dt(1.0, state.epsilon) * (1.0 + 1e-12))
    throw std::runtime_error("CFL violation: dt too large for this mesh/velocity grid");
  const double eps = state.epsilon;
  KineticState next;
  next.epsilon = eps;
  next.time = state.time + dt;
  next.values = state.values + (dt / eps) * apply_transport(state.values, correction_mag);

  const double c = dt / (eps * eps);
  switch (model.kind) {
    case CollisionModel::Kind::Bgk: {
      const double shrink = 1.0 / (1.0 + c);
      for (int cell = 0; cell < next.values.rows(); ++cell) {
        Eigen::VectorXd f = next.values.row(cell).transpose();
        Eigen::VectorXd pf = project_pi(*grid_, f);
        next.values.row(cell) = (pf + shrink * (f - pf)).transpose();
      }
      break;
    }
    case CollisionModel::Kind::MassRelax: {
      const double shrink = 1.0 / (1.0 + c);
      for (int cell = 0; cell < next.values.rows(); ++cell) {
        Eigen::VectorXd f = next.values.row(cell).transpose();
        double rho = grid_->w.dot(f);
        next.values.row(cell) = (rho * grid_->mu + shrink * (f - rho * grid_->mu)).transpose();
      }
      break;
    }
    case CollisionModel::Kind::WeakBgk: {
      // (I + c (I-pi) W (I-pi)) f = f*, SPD after the w/mu similarity scaling;
      // one Cholesky serves every cell and every step at fixed dt/eps^2.
      const int nv = grid_->nv;
      Eigen::VectorXd dsqrt = grid_->w_over_mu.array().sqrt();
      if (!weak_cache_.valid || weak_cache_.c != c ||
          weak_cache_.omega0_exponent != model.omega0_exponent) {
        Eigen::MatrixXd A = -collision_matrix(model, *grid_);
        Eigen::MatrixXd Asym = dsqrt.asDiagonal() * A * dsqrt.cwiseInverse().asDiagonal();
        Eigen::MatrixXd M =
            Eigen::MatrixXd::Identity(nv, nv) + c * 0.5 * (Asym + Asym.transpose());
        weak_cache_.llt.compute(M);
        weak_cache_.c = c;
        weak_cache_.omega0_exponent = model.omega0_exponent;
        weak_cache_.valid = true;
      }
      for (int cell = 0; cell < next.values.rows(); ++cell) {
        Eigen::VectorXd rhs = dsqrt.asDiagonal() * next.values.row(cell).transpose();
        Eigen::VectorXd sol = weak_cache_.llt.solve(rhs);
        next.values.row(cell) = (dsqrt.cwiseInverse().asDiagonal() * sol).transpose();
      }
      break;
    }
  }
  if (!next.values.allFinite()) throw std::runtime_error("non-finite state: blow-up guard");
  return next;
}

double TransportSolver::total_mass(const Eigen::MatrixXd& values) const {
  MacroFields mf = moments(*grid_, values);
  double s = 0;
  for (int c = 0; c < values.rows(); ++c) s += mesh_->cell_areas[c] * mf.rho(c);
  return s;
}

double TransportSolver::total_energy(const Eigen::MatrixXd& values) const {
  Eigen::VectorXd we(grid_->nv);
  for (int k = 0; k < grid_->nv; ++k) we(k) = grid_->w(k) * grid_->nodes[k].squaredNorm();
  Eigen::VectorXd per_cell = values * we;
  double s = 0;
  for (int c = 0; c < values.rows(); ++c) s += mesh_->cell_areas[c] * per_cell(c);
  return s;
}

double TransportSolver::total_angular_momentum(const Eigen::MatrixXd& values) const {
  MacroFields mf = moments(*grid_, values);
  double s = 0;
  for (int c = 0; c < values.rows(); ++c) {
    const Vec2& x = mesh_->cell_centroids[c];
    s += mesh_->cell_areas[c] * (-x.y() * mf.m(c, 0) + x.x() * mf.m(c, 1));
  }
  return s;
}

double TransportSolver::inner_H(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) const {
  Eigen::VectorXd per_cell = (f.array() * g.array()).matrix() * grid_->w_over_mu;
  double s = 0;
  for (int c = 0; c < f.rows(); ++c) s += mesh_->cell_areas[c] * per_cell(c);
  return s;
}

double TransportSolver::norm_H_weighted(const Eigen::MatrixXd& f,
                                        const Eigen::VectorXd& vweight) const {
  Eigen::VectorXd wk = grid_->w_over_mu.cwiseProduct(vweight);
  Eigen::VectorXd per_cell = (f.array() * f.array()).matrix() * wk;
  double s = 0;
  for (int c = 0; c < f.rows(); ++c) s += mesh_->cell_areas[c] * per_cell(c);
  return std::sqrt(s);
}

Eigen::MatrixXd TransportSolver::micro_part(const Eigen::MatrixXd& values) const {
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (int c = 0; c < values.rows(); ++c) {
    Eigen::VectorXd f = values.row(c).transpose();
    out.row(c) = (f - project_pi(*grid_, f)).transpose();
  }
  return out;
}

KineticState TransportSolver::make_admissible(const KineticState& state, bool specular_walls,
                                              const RigidFieldBasis& rigid) const {
  KineticState out = state;
  const int nc = static_cast<int>(state.values.rows());

  // Global conserved modes: mu always; the energy mode and the rigid-rotation
  // momentum modes only under pure specular walls.
  std::vector<Eigen::MatrixXd> modes;
  {
    Eigen::MatrixXd g0(nc, grid_->nv);
    for (int c = 0; c < nc; ++c) g0.row(c) = grid_->mu.transpose();
    modes.push_back(std::move(g0));
  }
  if (specular_walls) {
    Eigen::MatrixXd g1(nc, grid_->nv);
    for (int c = 0; c < nc; ++c)
      g1.row(c) = grid_->energy_mode.cwiseProduct(grid_->mu).transpose();
    modes.push_back(std::move(g1));
    for (const auto& A : rigid.basis) {
      Eigen::MatrixXd g2(nc, grid_->nv);
      for (int c = 0; c < nc; ++c) {
        Vec2 r = A * mesh_->cell_centroids[c];
        for (int k = 0; k < grid_->nv; ++k)
          g2(c, k) = r.dot(grid_->nodes[k]) * grid_->mu(k);
      }
      modes.push_back(std::move(g2));
    }
  }
  for (const auto& g : modes) {
    double proj = inner_H(out.values, g) / inner_H(g, g);
    out.values -= proj * g;
  }
  return out;
}

KineticState TransportSolver::make_initial(const InitialCondition& ic, double epsilon,
                                           std::uint64_t seed) const {
  const int nc = mesh_->n_cells();
  KineticState st;
  st.epsilon = epsilon;
  st.values = Eigen::MatrixXd::Zero(nc, grid_->nv);
  auto gen = substream(seed, "initial");
  std::normal_distribution<double> nd;
  auto gaussian = [&](const Vec2& x) {
    double r2 = (x - ic.center).squaredNorm() / (2.0 * ic.width * ic.width);
    return std::exp(-r2);
  };
  switch (ic.kind) {
    case InitialCondition::Kind::Zero:
      break;
    case InitialCondition::Kind::RhoBump:
      for (int c = 0; c < nc; ++c)
        st.values.row(c) = ic.amplitude * gaussian(mesh_->cell_centroids[c]) *
                           grid_->mu.transpose();
      break;
    case InitialCondition::Kind::ThetaBump:
      for (int c = 0; c < nc; ++c)
        st.values.row(c) = ic.amplitude * gaussian(mesh_->cell_centroids[c]) *
                           grid_->energy_mode.cwiseProduct(grid_->mu).transpose();
      break;
    case InitialCondition::Kind::Shear:
      for (int c = 0; c < nc; ++c) {
        const Vec2& x = mesh_->cell_centroids[c];
        Vec2 m(std::sin(2.0 * std::numbers::pi * x.y()), std::cos(2.0 * std::numbers::pi * x.x()));
        for (int k = 0; k < grid_->nv; ++k)
          st.values(c, k) = ic.amplitude * m.dot(grid_->nodes[k]) * grid_->mu(k);
      }
      break;
    case InitialCondition::Kind::Noise:
      for (int c = 0; c < nc; ++c)
        for (int k = 0; k < grid_->nv; ++k)
          st.values(c, k) = ic.amplitude * nd(gen) * grid_->mu(k);
      break;
    case InitialCondition::Kind::Mixed: {
      for (int c = 0; c < nc; ++c) {
        const Vec2& x = mesh_->cell_centroids[c];
        double rho = gaussian(x);
        Vec2 m(std::sin(2.0 * std::numbers::pi * x.y()), -std::sin(2.0 * std::numbers::pi * x.x()));
        double th = std::cos(std::numbers::pi * x.x()) * std::cos(std::numbers::pi * x.y());
        for (int k = 0; k < grid_->nv; ++k) {
          st.values(c, k) = ic.amplitude *
                            (rho + 0.7 * m.dot(grid_->nodes[k]) + 0.5 * th * grid_->energy_mode(k) +
                             0.3 * nd(gen)) *
                            grid_->mu(k);
        }
      }
      break;
    }
    case InitialCondition::Kind::TailSeed: {
      // Weight toward large |v| so weighted-space dynamics are visible.
      for (int c = 0; c < nc; ++c) {
        double bump = gaussian(mesh_->cell_centroids[c]);
        for (int k = 0; k < grid_->nv; ++k) {
          double r2 = grid_->nodes[k].squaredNorm();
          st.values(c, k) = ic.amplitude * bump * (0.2 + r2) * nd(gen) * grid_->mu(k);
        }
      }
      break;
    }
  }
  return make_admissible(st, specular_walls_, rigid_);
}

Trajectory TransportSolver::run(const RunConfig& config, const KineticState& initial,
                                const std::function<double(const KineticState&)>& lyapunov) const {
  Trajectory traj;
  const double dt = max_dt(config.cfl, config.epsilon);
  traj.dt = dt;
  KineticState st = initial;
  st.epsilon = config.epsilon;

  const double mass0 = total_mass(st.values);
  const double energy0 = total_energy(st.values);
  const double ang0 = total_angular_momentum(st.values);
  double corr_accum = 0;

  auto record = [&](const KineticState& s, double corr) {
    TrajectoryRow row;
    row.t = s.time;
    Eigen::MatrixXd fperp = micro_part(s.values);
    MacroFields mf = moments(*grid_, s.values);
    row.H_norm = norm_H(s.values);
    row.Hperp_norm = norm_H(fperp);
    double r2 = 0, m2 = 0, t2 = 0;
    for (int c = 0; c < s.values.rows(); ++c) {
      double a = mesh_->cell_areas[c];
      r2 += a * mf.rho(c) * mf.rho(c);
      m2 += a * mf.m.row(c).squaredNorm();
      t2 += a * mf.theta(c) * mf.theta(c);
    }
    row.rho_L2 = std::sqrt(r2);
    row.m_L2 = std::sqrt(m2);
    row.theta_L2 = std::sqrt(t2);
    row.lyap = lyapunov ? lyapunov(s) : row.H_norm * row.H_norm;
    row.boundary_diss = bops_->dperp_boundary_norm(*grid_, *mesh_, s.values);
    row.mass_residual = total_mass(s.values) - mass0;
    row.energy_residual = total_energy(s.values) - energy0;
    row.angmom_residual = total_angular_momentum(s.values) - ang0;
    row.correction_mag = corr;
    traj.rows.push_back(row);
  };

  record(st, 0.0);
  const long n_steps = static_cast<long>(std::ceil(config.t_end / dt));
  for (long n = 0; n < n_steps; ++n) {
    double corr = 0;
    st = step(st, dt, config.collision, &corr);
    corr_accum += corr * dt;
    if ((n + 1) % config.record_every == 0 || n + 1 == n_steps) record(st, corr_accum);
  }
  return traj;
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,H_norm,Hperp_norm,rho_L2,m_L2,theta_L2,lyap,boundary_diss,mass_residual,"
        "energy_residual,angmom_residual,correction_mag\n";
  for (const auto& r : rows) {
    os << r.t << ',' << r.H_norm << ',' << r.Hperp_norm << ',' << r.rho_L2 << ',' << r.m_L2 << ','
       << r.theta_L2 << ',' << r.lyap << ',' << r.boundary_diss << ',' << r.mass_residual << ','
       << r.energy_residual << ',' << r.angmom_residual << ',' << r.correction_mag << '\n';
  }
  return os.str();
}

}  // namespace hypokin
