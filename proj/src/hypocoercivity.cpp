#include "hypokin/hypocoercivity.hpp"

#include <cmath>
#include <numbers>

#include "hypokin/rng.hpp"

namespace hypokin {

namespace {

// Least-squares cell gradient of a cellwise scalar field from edge neighbors.
Eigen::MatrixX2d ls_cell_gradient(const Mesh& mesh, const Eigen::VectorXd& cell_values) {
  Eigen::MatrixX2d g = Eigen::MatrixX2d::Zero(mesh.n_cells(), 2);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    Eigen::Matrix2d AtA = Eigen::Matrix2d::Zero();
    Vec2 Atb = Vec2::Zero();
    for (const auto& ref : mesh.cell_edges[c]) {
      if (ref.boundary) continue;
      const auto& ie = mesh.interior_edges[ref.id];
      int nbr = (ie.cell_left == c) ? ie.cell_right : ie.cell_left;
      Vec2 dx = mesh.cell_centroids[nbr] - mesh.cell_centroids[c];
      double df = cell_values(nbr) - cell_values(c);
      AtA += dx * dx.transpose();
      Atb += df * dx;
    }
    if (AtA.determinant() > 1e-30) g.row(c) = AtA.ldlt().solve(Atb).transpose();
  }
  return g;
}

// Dual finite-volume divergence of a cellwise vector field (face values by
// arithmetic average; one-sided at the boundary).
Eigen::VectorXd fv_divergence(const Mesh& mesh, const Eigen::MatrixX2d& field) {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(mesh.n_cells());
  for (const auto& ie : mesh.interior_edges) {
    Vec2 face = 0.5 * (field.row(ie.cell_left) + field.row(ie.cell_right)).transpose();
    double flux = face.dot(ie.normal) * ie.length;
    div(ie.cell_left) += flux / mesh.cell_areas[ie.cell_left];
    div(ie.cell_right) -= flux / mesh.cell_areas[ie.cell_right];
  }
  for (const auto& be : mesh.boundary_edges) {
    Vec2 face = field.row(be.cell).transpose();
    div(be.cell) += face.dot(be.normal) * be.length / mesh.cell_areas[be.cell];
  }
  return div;
}

double cell_l2(const Mesh& mesh, const Eigen::VectorXd& r) {
  double s = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) s += mesh.cell_areas[c] * r(c) * r(c);
  return std::sqrt(s);
}

}  // namespace

HypoWorkspace::HypoWorkspace(const TransportSolver& solver, const CollisionModel& model)
    : solver_(&solver), model_(model) {
  const Mesh& mesh = solver.mesh();
  auto alpha = alpha_from_mesh(mesh);
  poisson_alpha_ = assemble_poisson(mesh, alpha);
  poisson_neumann_ = assemble_poisson(mesh, alpha_constant(mesh, 0.0));
  RigidFieldBasis rigid = rigid_fields(mesh, 1e-10 * mesh.boundary_length);
  lame_ = assemble_lame(mesh, alpha, rigid);
  specular_ = solver.specular_walls();
}

AuxSolutions HypoWorkspace::solve_aux(const Eigen::MatrixXd& values, bool enforce_compat) const {
  const Mesh& mesh = solver_->mesh();
  MacroFields mf = moments(solver_->grid(), values);
  AuxSolutions aux;

  // Poisson with the mesh alpha profile, source theta. With specular walls
  // this is the Neumann problem; admissibility supplies the compatibility.
  {
    Eigen::VectorXd rhs = rhs_from_cellwise(mesh, mf.theta);
    if (poisson_alpha_.neumann && !enforce_compat) {
      double mean = rhs.sum();
      rhs -= mean / poisson_alpha_.load.sum() * poisson_alpha_.load;
      aux.st_theta.compat_defect = std::abs(mean);
    }
    aux.u_theta = solve_poisson(mesh, poisson_alpha_, rhs, &aux.st_theta);
    aux.u_theta.produced_by = "poisson[theta]";
    aux.grad_u_theta = cell_gradient(mesh, aux.u_theta.nodal);
  }
  // Lame with source m.
  {
    aux.U_m = solve_lame(mesh, lame_, mf.m, &aux.st_m, enforce_compat);
    aux.U_m.produced_by = "lame[m]";
    aux.symgrad_U_m = cell_sym_gradient(mesh, aux.U_m.nodal);
  }
  // Neumann with source rho.
  {
    Eigen::VectorXd rhs = rhs_from_cellwise(mesh, mf.rho);
    if (!enforce_compat) {
      double mean = rhs.sum();
      rhs -= mean / poisson_neumann_.load.sum() * poisson_neumann_.load;
      aux.st_rho.compat_defect = std::abs(mean);
    }
    aux.u_rho = solve_poisson(mesh, poisson_neumann_, rhs, &aux.st_rho);
    aux.u_rho.produced_by = "neumann[rho]";
    aux.grad_u_rho = cell_gradient(mesh, aux.u_rho.nodal);
  }
  return aux;
}

HypoWorkspace::Channels HypoWorkspace::coupling(const AuxSolutions& aux_a,
                                                const Eigen::MatrixXd& values_b) const {
  const Mesh& mesh = solver_->mesh();
  MacroFields mf_b = moments(solver_->grid(), values_b);
  MomentFields mm_b = moment_fields(solver_->grid(), values_b);
  Channels ch;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double a = mesh.cell_areas[c];
    ch.theta -= a * (aux_a.grad_u_theta(c, 0) * mm_b.Mp(c, 0) +
                     aux_a.grad_u_theta(c, 1) * mm_b.Mp(c, 1));
    ch.m -= a * (aux_a.symgrad_U_m(c, 0) * mm_b.Mq(c, 0) +
                 aux_a.symgrad_U_m(c, 1) * mm_b.Mq(c, 1) +
                 2.0 * aux_a.symgrad_U_m(c, 2) * mm_b.Mq(c, 2));
    ch.rho -= a * (aux_a.grad_u_rho(c, 0) * mf_b.m(c, 0) +
                   aux_a.grad_u_rho(c, 1) * mf_b.m(c, 1));
  }
  return ch;
}

double HypoWorkspace::hypo_inner(const Eigen::MatrixXd& f, const AuxSolutions& aux_f,
                                 const Eigen::MatrixXd& g, const AuxSolutions& aux_g,
                                 const HypoParams& p) const {
  Channels fg = coupling(aux_f, g);
  Channels gf = coupling(aux_g, f);
  const double s = p.coupling_scale();
  return solver_->inner_H(f, g) + s * (p.eta1() * (fg.theta + gf.theta) +
                                       p.eta2() * (fg.m + gf.m) + p.eta3() * (fg.rho + gf.rho));
}

double HypoWorkspace::hypo_inner(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                                 const HypoParams& p) const {
  AuxSolutions af = solve_aux(f, false);
  AuxSolutions ag = solve_aux(g, false);
  return hypo_inner(f, af, g, ag, p);
}

double HypoWorkspace::lyapunov(const KineticState& state, const HypoParams& p) const {
  AuxSolutions aux = solve_aux(state.values, false);
  return hypo_inner(state.values, aux, state.values, aux, p);
}

HypoWorkspace::SampleChannels HypoWorkspace::sample_channels(const KineticState& f) const {
  SampleChannels s{};
  Eigen::MatrixXd Tf = solver_->apply_transport(f.values);
  Eigen::MatrixXd Cf = solver_->apply_collision_all(model_, f.values);
  AuxSolutions af = solve_aux(f.values, true);
  AuxSolutions aT = solve_aux(Tf, false);
  AuxSolutions aC = solve_aux(Cf, false);

  s.n0 = solver_->inner_H(f.values, f.values);
  Channels ff = coupling(af, f.values);
  s.ntheta = 2 * ff.theta;
  s.nm = 2 * ff.m;
  s.nrho = 2 * ff.rho;

  s.aT0 = solver_->inner_H(Tf, f.values);
  Channels fT = coupling(af, Tf);
  Channels Tf_f = coupling(aT, f.values);
  s.aTtheta = fT.theta + Tf_f.theta;
  s.aTm = fT.m + Tf_f.m;
  s.aTrho = fT.rho + Tf_f.rho;

  s.aC0 = solver_->inner_H(Cf, f.values);
  Channels fC = coupling(af, Cf);
  Channels Cf_f = coupling(aC, f.values);
  s.aCtheta = fC.theta + Cf_f.theta;
  s.aCm = fC.m + Cf_f.m;
  s.aCrho = fC.rho + Cf_f.rho;

  Eigen::MatrixXd fperp = solver_->micro_part(f.values);
  s.perp2 = solver_->inner_H(fperp, fperp);
  return s;
}

double HypoWorkspace::kappa_of(const SampleChannels& s, const HypoParams& p) {
  const double eps = p.epsilon;
  const double cs = p.coupling_scale();
  double a0 = s.aT0 / eps + s.aC0 / (eps * eps);
  double at = s.aTtheta / eps + s.aCtheta / (eps * eps);
  double am = s.aTm / eps + s.aCm / (eps * eps);
  double ar = s.aTrho / eps + s.aCrho / (eps * eps);
  double diss = -(a0 + cs * (p.eta1() * at + p.eta2() * am + p.eta3() * ar));
  double denom = norm2_of(s, p);
  if (p.variant == HypoParams::Variant::Epsilon) denom += s.perp2 / (eps * eps);
  return diss / denom;
}

double HypoWorkspace::norm2_of(const SampleChannels& s, const HypoParams& p) {
  const double cs = p.coupling_scale();
  return s.n0 + cs * (p.eta1() * s.ntheta + p.eta2() * s.nm + p.eta3() * s.nrho);
}

double HypoWorkspace::dissipation(const KineticState& state, const HypoParams& p) const {
  SampleChannels s = sample_channels(state);
  const double eps = p.epsilon;
  const double cs = p.coupling_scale();
  double a0 = s.aT0 / eps + s.aC0 / (eps * eps);
  double at = s.aTtheta / eps + s.aCtheta / (eps * eps);
  double am = s.aTm / eps + s.aCm / (eps * eps);
  double ar = s.aTrho / eps + s.aCrho / (eps * eps);
  return -(a0 + cs * (p.eta1() * at + p.eta2() * am + p.eta3() * ar));
}

KineticState HypoWorkspace::sample_state(std::uint64_t seed, int index) const {
  const Mesh& mesh = solver_->mesh();
  const VelocityGrid& grid = solver_->grid();
  auto gen = substream(seed, "hypo.sample", static_cast<std::uint64_t>(index));
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> typ(0, 2);
  const int nc = mesh.n_cells();
  KineticState st;
  st.values = Eigen::MatrixXd::Zero(nc, grid.nv);
  int kind = typ(gen);

  // Smooth macroscopic content: a few low Fourier modes per component.
  auto smooth_field = [&](double kx1, double ky1, double ph1, double kx2, double ky2, double ph2,
                          double a1, double a2) {
    Eigen::VectorXd v(nc);
    for (int c = 0; c < nc; ++c) {
      const Vec2& x = mesh.cell_centroids[c];
      v(c) = a1 * std::cos(kx1 * x.x() + ky1 * x.y() + ph1) +
             a2 * std::sin(kx2 * x.x() + ky2 * x.y() + ph2);
    }
    return v;
  };
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  auto rk = [&]() { return std::numbers::pi * std::round(3.0 * ud(gen)); };

  if (kind == 0 || kind == 2) {
    Eigen::VectorXd rho = smooth_field(rk(), rk(), ud(gen), rk(), rk(), ud(gen), nd(gen), nd(gen));
    Eigen::VectorXd m1 = smooth_field(rk(), rk(), ud(gen), rk(), rk(), ud(gen), nd(gen), nd(gen));
    Eigen::VectorXd m2 = smooth_field(rk(), rk(), ud(gen), rk(), rk(), ud(gen), nd(gen), nd(gen));
    Eigen::VectorXd th = smooth_field(rk(), rk(), ud(gen), rk(), rk(), ud(gen), nd(gen), nd(gen));
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < grid.nv; ++k)
        st.values(c, k) += (rho(c) + m1(c) * grid.nodes[k].x() + m2(c) * grid.nodes[k].y() +
                            th(c) * grid.energy_mode(k)) *
                           grid.mu(k);
  }
  if (kind == 1 || kind == 2) {
    double amp = (kind == 2) ? 0.3 : 1.0;
    for (int c = 0; c < nc; ++c)
      for (int k = 0; k < grid.nv; ++k) st.values(c, k) += amp * nd(gen) * grid.mu(k);
  }
  RigidFieldBasis rigid = rigid_fields(mesh, 1e-10 * mesh.boundary_length);
  return solver_->make_admissible(st, solver_->specular_walls(), rigid);
}

CertificateReport HypoWorkspace::coercivity_certificate(int n_samples, std::uint64_t seed,
                                                        HypoParams params,
                                                        std::optional<double> fixed_eta) const {
  if (n_samples < 100) throw std::invalid_argument("certificate needs at least 100 samples");
  CertificateReport rep;
  rep.n_samples = n_samples;
  rep.epsilon = params.epsilon;
  rep.variant = params.variant;

  std::vector<SampleChannels> chans(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    KineticState st = sample_state(seed, i);
    st.epsilon = params.epsilon;
    chans[i] = sample_channels(st);
  }

  auto kappa_min = [&](double eta) {
    HypoParams p = params;
    p.eta = eta;
    double kmin = std::numeric_limits<double>::max();
    int arg = -1;
    for (int i = 0; i < n_samples; ++i) {
      double k = kappa_of(chans[i], p);
      if (k < kmin) {
        kmin = k;
        arg = i;
      }
    }
    return std::make_pair(kmin, arg);
  };

  if (fixed_eta) {
    rep.eta = *fixed_eta;
  } else {
    // Automated sweep: log grid over (0, 0.5], keep the kappa-maximizing eta.
    double best_eta = 0.05, best_kappa = -std::numeric_limits<double>::max();
    for (int j = 0; j < 40; ++j) {
      double eta = 0.5 * std::pow(1e-3 / 0.5, j / 39.0);
      auto [k, arg] = kappa_min(eta);
      rep.eta_scan.emplace_back(eta, k);
      if (k > best_kappa) {
        best_kappa = k;
        best_eta = eta;
      }
    }
    rep.eta = best_eta;
  }
  auto [k, arg] = kappa_min(rep.eta);
  rep.kappa_hat = k;
  rep.argmin_sample = arg;

  HypoParams p = params;
  p.eta = rep.eta;
  rep.norm_equiv_min = std::numeric_limits<double>::max();
  rep.norm_equiv_max = -std::numeric_limits<double>::max();
  for (int i = 0; i < n_samples; ++i) {
    double r = norm2_of(chans[i], p) / chans[i].n0;
    rep.norm_equiv_min = std::min(rep.norm_equiv_min, r);
    rep.norm_equiv_max = std::max(rep.norm_equiv_max, r);
  }
  return rep;
}

LemmaResiduals HypoWorkspace::lemma_diagnostics(const KineticState& state) const {
  const Mesh& mesh = solver_->mesh();
  const VelocityGrid& grid = solver_->grid();
  LemmaResiduals out;

  KineticState unit = state;
  unit.epsilon = 1.0;  // diagnostics evaluate the unscaled generator
  Eigen::MatrixXd Lf = solver_->apply_generator(model_, unit);
  MacroFields mf = moments(grid, state.values);
  MacroFields mfL = moments(grid, Lf);
  MomentFields mm = moment_fields(grid, state.values);
  Eigen::MatrixXd fperp = solver_->micro_part(state.values);
  MomentFields mmp = moment_fields(grid, fperp);

  // Velocity-exact identities.
  out.res_Mpf = (mm.Mp - mmp.Mp).cwiseAbs().maxCoeff();
  Eigen::MatrixX3d mq_macro(mesh.n_cells(), 3);
  const double sq2d = std::sqrt(2.0 / 2.0);  // sqrt(2/d), d = 2
  for (int c = 0; c < mesh.n_cells(); ++c) {
    mq_macro(c, 0) = sq2d * mf.theta(c);
    mq_macro(c, 1) = sq2d * mf.theta(c);
    mq_macro(c, 2) = 0.0;
  }
  out.res_Mqf = (mm.Mq - mq_macro - mmp.Mq).cwiseAbs().maxCoeff();

  // Identity residuals with the dual FV divergence / LS gradient.
  Eigen::VectorXd div_m = fv_divergence(mesh, mf.m);
  out.res_rhoLf = cell_l2(mesh, mfL.rho + div_m);
  Eigen::VectorXd div_Mp = fv_divergence(mesh, mm.Mp);
  out.res_thetaLf = cell_l2(mesh, mfL.theta + sq2d * div_m + div_Mp);
  Eigen::MatrixX2d q_row1(mesh.n_cells(), 2), q_row2(mesh.n_cells(), 2);
  q_row1.col(0) = mm.Mq.col(0);
  q_row1.col(1) = mm.Mq.col(2);
  q_row2.col(0) = mm.Mq.col(2);
  q_row2.col(1) = mm.Mq.col(1);
  Eigen::VectorXd div_q1 = fv_divergence(mesh, q_row1);
  Eigen::VectorXd div_q2 = fv_divergence(mesh, q_row2);
  Eigen::MatrixX2d grad_rho = ls_cell_gradient(mesh, mf.rho);
  Eigen::VectorXd r1 = mfL.m.col(0) + grad_rho.col(0) + div_q1;
  Eigen::VectorXd r2 = mfL.m.col(1) + grad_rho.col(1) + div_q2;
  out.res_mLf = std::sqrt(std::pow(cell_l2(mesh, r1), 2) + std::pow(cell_l2(mesh, r2), 2));

  // Microscopic gap (Lemma "micro"): includes the boundary trace term.
  double dperp2 = solver_->boundary().dperp_boundary_norm(grid, mesh, state.values);
  out.dperp2 = dperp2;
  out.perp2 = solver_->inner_H(fperp, fperp);
  out.micro_gap =
      -solver_->inner_H(Lf, state.values) - model_.lambda * out.perp2 - 0.5 * dperp2;

  for (int c = 0; c < mesh.n_cells(); ++c) {
    double a = mesh.cell_areas[c];
    out.theta2 += a * mf.theta(c) * mf.theta(c);
    out.m2 += a * mf.m.row(c).squaredNorm();
    out.rho2 += a * mf.rho(c) * mf.rho(c);
  }

  AuxSolutions af = solve_aux(state.values, true);
  AuxSolutions aL = solve_aux(Lf, false);
  Channels fL = coupling(af, Lf);
  Channels Lf_f = coupling(aL, state.values);
  out.lemma_energy_lhs = fL.theta + Lf_f.theta;
  out.lemma_momentum_lhs = fL.m + Lf_f.m;
  out.lemma_mass_lhs = fL.rho + Lf_f.rho;
  return out;
}

DecayReport fit_decay(const std::vector<TrajectoryRow>& rows, double window_start_fraction) {
  DecayReport rep;
  if (rows.empty()) throw std::invalid_argument("fit_decay: empty trajectory");
  double t_end = rows.back().t;
  double t0 = window_start_fraction * t_end;
  std::vector<double> ts, ys;
  for (const auto& r : rows) {
    if (r.t < t0) continue;
    if (!(r.H_norm > 0)) throw std::invalid_argument("fit_decay: non-positive norm in window");
    ts.push_back(r.t);
    ys.push_back(std::log(r.H_norm));
  }
  if (ts.size() < 20) throw std::invalid_argument("fit_decay: fewer than 20 samples in window");
  const int n = static_cast<int>(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int i = 0; i < n; ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  double denom = n * stt - st * st;
  double slope = denom != 0 ? (n * sty - st * sy) / denom : 0.0;
  double icept = (sy - slope * st) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (int i = 0; i < n; ++i) {
    double e = ys[i] - (slope * ts[i] + icept);
    ss_res += e * e;
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  rep.kappa = -slope;
  rep.C = std::exp(icept);
  rep.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  rep.window_start = ts.front();
  rep.window_end = ts.back();
  rep.n_points = n;
  return rep;
}

double weak_envelope(double t, const std::function<double(double)>& omega0,
                     const std::function<double(double)>& omega1, double c, double kappa,
                     double C, double r_max, int n_scan) {
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < n_scan; ++i) {
    double r = std::pow(r_max, static_cast<double>(i) / (n_scan - 1));
    double val = std::exp(-c * kappa * t / omega0(r)) + C / (c * omega1(r));
    best = std::min(best, val);
  }
  return std::sqrt(best);
}

}  // namespace hypokin
