#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "hypokin/collision.hpp"
#include "hypokin/elliptic.hpp"
#include "hypokin/transport.hpp"

namespace hypokin {

struct HypoParams {
  double eta = 0.05;
  double epsilon = 1.0;
  enum class Variant { Strong, Epsilon, Weak } variant = Variant::Strong;

  double eta1() const { return eta; }
  double eta2() const { return std::pow(eta, 1.5); }
  double eta3() const { return std::pow(eta, 1.75); }
  // The epsilon variant scales every coupling term by epsilon.
  double coupling_scale() const { return variant == Variant::Epsilon ? epsilon : 1.0; }
};

struct AuxSolutions {
  ScalarField u_theta;
  VectorField U_m;
  ScalarField u_rho;
  Eigen::MatrixX2d grad_u_theta;  // per cell
  Eigen::MatrixX3d symgrad_U_m;   // per cell: xx, yy, xy
  Eigen::MatrixX2d grad_u_rho;    // per cell
  SolveStats st_theta, st_m, st_rho;
};

struct LemmaResiduals {
  double micro_gap = 0;       // <-Lf,f> - lambda ||f_perp||^2 - 1/2 ||sqrt(a(2-a)) Dperp f+||^2
  double res_rhoLf = 0;       // L2 residual of rho[Lf] + div m
  double res_thetaLf = 0;     // L2 residual of theta[Lf] + sqrt(2/d) div m + div Mp[f]
  double res_mLf = 0;         // L2 residual of m[Lf] + grad rho + div Mq[f]
  double res_Mpf = 0;         // max |Mp[f] - Mp[f_perp]|
  double res_Mqf = 0;         // max |Mq[f] - sqrt(2/d) theta I - Mq[f_perp]|
  double lemma_energy_lhs = 0;    // Lemma "energy" pairing (controls theta)
  double lemma_momentum_lhs = 0;  // Lemma "momentum" pairing (controls m)
  double lemma_mass_lhs = 0;      // Lemma "mass" pairing (controls rho)
  double theta2 = 0, m2 = 0, rho2 = 0, perp2 = 0, dperp2 = 0;
};

struct DecayReport {
  double kappa = 0;
  double C = 0;
  double r2 = 0;
  double window_start = 0, window_end = 0;
  int n_points = 0;
};

struct CertificateReport {
  double eta = 0;
  double kappa_hat = 0;
  int n_samples = 0;
  int argmin_sample = -1;
  double norm_equiv_min = 0, norm_equiv_max = 0;
  std::vector<std::pair<double, double>> eta_scan;  // (eta, kappa_hat(eta))
  double epsilon = 1.0;
  HypoParams::Variant variant = HypoParams::Variant::Strong;
};

/// Caches the assembled elliptic systems for one (mesh, alpha) pair and
/// evaluates the modified scalar product, lemma residuals, certificates and
/// decay fits.
class HypoWorkspace {
 public:
  HypoWorkspace(const TransportSolver& solver, const CollisionModel& model);

  // Three auxiliary solves on the state's macro fields. enforce_compat=false
  // is for generator-derived sources whose rigid compatibility holds only up
  // to the conservation defect (recorded in the stats).
  AuxSolutions solve_aux(const Eigen::MatrixXd& values, bool enforce_compat = true) const;

  // Coupling channels  E_x(a;b) with aux of a and moments of b:
  //   theta: <-grad u[theta[a]], Mp[b]>,  m: <-grad^s U[m[a]], Mq[b]>,
  //   rho:   <-grad uN[rho[a]], m[b]>.
  struct Channels {
    double theta = 0, m = 0, rho = 0;
  };
  Channels coupling(const AuxSolutions& aux_a, const Eigen::MatrixXd& values_b) const;

  double hypo_inner(const Eigen::MatrixXd& f, const AuxSolutions& aux_f,
                    const Eigen::MatrixXd& g, const AuxSolutions& aux_g,
                    const HypoParams& params) const;
  // Convenience: computes both aux solutions.
  double hypo_inner(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g,
                    const HypoParams& params) const;
  double lyapunov(const KineticState& state, const HypoParams& params) const;

  // <<-L_eps f, f>>_eps for one state, all parts computed discretely.
  double dissipation(const KineticState& state, const HypoParams& params) const;

  LemmaResiduals lemma_diagnostics(const KineticState& state) const;

  CertificateReport coercivity_certificate(int n_samples, std::uint64_t seed,
                                           HypoParams params,
                                           std::optional<double> fixed_eta = std::nullopt) const;

  // Random admissible states used by certificates and norm-equivalence scans.
  KineticState sample_state(std::uint64_t seed, int index) const;

  const TransportSolver& solver() const { return *solver_; }
  const CollisionModel& model() const { return model_; }

 private:
  const TransportSolver* solver_;
  CollisionModel model_;
  PoissonSystem poisson_alpha_;  // mesh alpha profile
  PoissonSystem poisson_neumann_;
  LameSystem lame_;
  bool specular_;

  struct SampleChannels {
    double n0, ntheta, nm, nrho;        // norm channels of f
    double aT0, aTtheta, aTm, aTrho;    // transport part of L
    double aC0, aCtheta, aCm, aCrho;    // collision part of L
    double perp2;
  };
  SampleChannels sample_channels(const KineticState& f) const;
  static double kappa_of(const SampleChannels& s, const HypoParams& p);
  static double norm2_of(const SampleChannels& s, const HypoParams& p);
};

DecayReport fit_decay(const std::vector<TrajectoryRow>& rows, double window_start_fraction = 0.1);

/// Sub-exponential envelope of the weak-coercivity regime:
///   theta(t) = inf_R { exp(-c kappa t / omega0(R)) + C / (c omega1(R)) }^(1/2),
/// evaluated by scanning R over a geometric grid.
double weak_envelope(double t, const std::function<double(double)>& omega0,
                     const std::function<double(double)>& omega1, double c, double kappa,
                     double C, double r_max = 1e8, int n_scan = 961);

}  // namespace hypokin
