#pragma once

// The integration-error identity on inner shells, the Hoelder-type bounds it
// implies for signed measures and quadrature rules, and potential estimates
// for partition-based rules and reduced scatterings.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphkh/harmonic.hpp"
#include "sphkh/measures.hpp"
#include "sphkh/sphere_geom.hpp"

namespace sphkh {

struct IdentityReport {
  /// sum_k w_k f(t_k)
  double lhs = 0.0;
  /// r^{d-1} sum_i w_i D(f_r)(zeta_i) U^sigma(r zeta_i)
  double rhs = 0.0;
  double residual = 0.0;
  /// residual / max(|lhs|, |sigma| max_k |f(t_k)|)
  double relative = 0.0;
  int truncation = 0;
  double truncation_tail = 0.0;
  int quadrature_degree = 0;
  std::size_t quadrature_nodes = 0;
};

/// f must be harmonic outside the ball of radius cfg.r0 (throws
/// std::invalid_argument otherwise, DivergenceError if rho_max >= r).
IdentityReport kh_identity(const HarmonicField& f, const DiscreteSignedMeasure& sigma, const ShellConfig& cfg,
                           const QuadratureMeasure& quad, double tol = 1e-12);

struct BoundReport {
  double lhs = 0.0;
  /// prefactor * d_norm * u_norm with prefactor 1/r0
  double rhs = 0.0;
  double slack = 0.0;
  /// Same with prefactor 1/r.
  double rhs_sharp = 0.0;
  double slack_sharp = 0.0;
  double p = 2.0;
  double p_conjugate = 2.0;
  /// ||D(f_r)||_{L_p(r S^d)}
  double d_norm = 0.0;
  /// ||U^sigma||_{L_p'(r S^d)}
  double u_norm = 0.0;
  double prefactor = 0.0;
  double prefactor_sharp = 0.0;
  /// Error made by integrating f against a quadrature surrogate of a continuous measure.
  double surrogate_budget = 0.0;
  int truncation = 0;
};

/// p' = p / (p - 1), with 1 and infinity paired.
double conjugate_exponent(double p);

/// Assembles a report from precomputed shell profiles of D(f_r) and U^sigma.
BoundReport bound_from_profiles(double lhs, const ShellProfile& d_profile, const ShellProfile& u_profile,
                                const QuadratureMeasure& quad, const ShellConfig& cfg, double p);

BoundReport theorem2_bound(const HarmonicField& f, const DiscreteSignedMeasure& sigma, const ShellConfig& cfg,
                           const QuadratureMeasure& quad, double p, double tol = 1e-12);

/// Quadrature error of the rule nu against mu, bounded through sigma = mu - nu.
BoundReport corollary3_error(const HarmonicField& f, const QuadratureMeasure& mu, const DiscreteSignedMeasure& nu,
                             const ShellConfig& cfg, const QuadratureMeasure& quad, double p, double tol = 1e-12);

/// Upper bound on |int f d mu - int f d mu_h| for a surrogate exact to degree mu_h.degree().
double surrogate_budget(const HarmonicField& f, const QuadratureMeasure& mu_h);

/// Sup of |U^sigma| on one shell radius.
struct RadiusCheck {
  double r = 0.0;
  double measured_sup = 0.0;
  double bound = 0.0;
};

struct Theorem4Report {
  double measured_sup = 0.0;
  double bound = 0.0;
  double partition_norm = 0.0;
  double mu_norm = 0.0;
  double r = 0.0;
  std::size_t n = 0;
  std::size_t shell_nodes = 0;
  std::optional<MeshNormEstimate> mesh_norm;
  std::optional<double> epsilon;
  /// (d-1) 8d sqrt(2d(d+1)) |mu| delta_upper / epsilon; must be < 1.
  std::optional<double> gate;
  /// (d-1) |mu| |R| / epsilon; must be < 1.
  std::optional<double> partition_ratio;
  std::optional<double> r_admissible_upper;
  std::optional<double> r0;
  std::optional<std::size_t> reduced_size;
  std::optional<double> reduction_constant;
  std::vector<RadiusCheck> radii;
  /// Empty when every claim held.
  std::string diagnosis;
};

/// (d - 1) |mu| |R| / (1 - r)^{d+1}
double theorem4_bound(SphereDim dim, double mu_norm, double partition_norm, double r);

/// a_k = mu(R_k) from the surrogate nodes lying in each region.
std::vector<double> region_masses(const QuadratureMeasure& mu, const SpherePartition& partition);

/// The rule sum_k mu(R_k) delta_{t_k} for a partition carrying representatives.
DiscreteSignedMeasure partition_rule(const QuadratureMeasure& mu, const SpherePartition& partition);

/// Requires every region to carry its (matched) representative.
Theorem4Report theorem4a_bound(const QuadratureMeasure& mu, const SpherePartition& matched, double r,
                               const QuadratureMeasure& quad);

/// Raised when a hypothesis of the epsilon pipeline fails; carries the
/// partially filled report with the offending quantities.
class GateFailure : public std::runtime_error {
 public:
  GateFailure(const std::string& what, Theorem4Report report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const Theorem4Report& report() const noexcept { return report_; }

 private:
  Theorem4Report report_;
};

/// Checks the mesh-norm gate, reduces E_o, checks the partition ratio and the
/// radius window, then measures sup |U^sigma| on `radii` equispaced radii
/// strictly inside (r0, window). Throws GateFailure on a failed hypothesis.
Theorem4Report theorem4b_pipeline(const Scattering& original, const QuadratureMeasure& mu, double epsilon, double r0,
                                  const QuadratureMeasure& quad, int radii = 8);

/// Smallest epsilon passing the mesh-norm gate for this scattering.
double gate_threshold(const Scattering& original, double mu_norm);

struct ScalingRow {
  std::size_t n = 0;
  MeshNormEstimate mesh_norm;
  double partition_norm = 0.0;
  double measured_sup = 0.0;
  double bound = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log(measured_sup) and log(partition_norm) against log(n).
  double sup_exponent = 0.0;
  double partition_exponent = 0.0;
};

/// One row per n: equal-area partition matched with its own centers.
ScalingStudy scaling_study(SphereDim dim, const std::vector<std::size_t>& n_values, double r,
                           const QuadratureMeasure& mu, const QuadratureMeasure& quad);

/// Slope of the least-squares line through (log x, log y).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sphkh
