#include "sphkh/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sphkh/error.hpp"
#include "sphkh/parallel.hpp"

namespace sphkh {

namespace {

void require_same_dim(SphereDim a, SphereDim b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void require_inside_r0(const HarmonicField& f, const ShellConfig& cfg) {
  if (f.rho_max() >= cfg.r) {
    throw DivergenceError("charges reach radius " + std::to_string(f.rho_max()) + " >= r = " + std::to_string(cfg.r));
  }
  if (f.rho_max() >= cfg.r0) {
    throw std::invalid_argument("field must be harmonic outside the ball of radius r0: charge radius " +
                                std::to_string(f.rho_max()) + " >= r0 = " + std::to_string(cfg.r0));
  }
}

double integrate_field(const HarmonicField& f, const std::vector<SpherePoint>& pts, const std::vector<double>& w,
                       double* max_abs = nullptr) {
  double s = 0.0, m = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double v = evaluate_field(f, pts[k].coords());
    s += w[k] * v;
    m = std::max(m, std::abs(v));
  }
  if (max_abs) *max_abs = m;
  return s;
}

double max_abs_difference(const ShellProfile& a, const ShellProfile& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

IdentityReport kh_identity(const HarmonicField& f, const DiscreteSignedMeasure& sigma, const ShellConfig& cfg,
                           const QuadratureMeasure& quad, double tol) {
  require_same_dim(f.dim(), sigma.dim(), "kh_identity");
  require_same_dim(f.dim(), quad.dim(), "kh_identity");
  require_inside_r0(f, cfg);
  const int d = f.dim().value();

  IdentityReport rep;
  double fmax = 0.0;
  rep.lhs = integrate_field(f, sigma.points(), sigma.weights(), &fmax);

  const FieldExpansion e = expand_field(f, cfg.r, tol);
  const std::vector<double> dprof = apply_D_on(e, quad);
  const ShellProfile uprof = potential_on_shell(sigma, cfg, quad);
  double s = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) s += quad.weights()[i] * dprof[i] * uprof[i];
  rep.rhs = std::pow(cfg.r, d - 1) * s;

  rep.residual = std::abs(rep.lhs - rep.rhs);
  const double scale = std::max(std::abs(rep.lhs), sigma.total_variation() * fmax);
  rep.relative = scale > 0.0 ? rep.residual / scale : rep.residual;
  rep.truncation = e.truncation;
  rep.truncation_tail = e.d_tail_bound;
  rep.quadrature_degree = quad.degree();
  rep.quadrature_nodes = quad.size();
  return rep;
}

double conjugate_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent p must satisfy p >= 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

BoundReport bound_from_profiles(double lhs, const ShellProfile& d_profile, const ShellProfile& u_profile,
                                const QuadratureMeasure& quad, const ShellConfig& cfg, double p) {
  BoundReport rep;
  rep.p = p;
  rep.p_conjugate = conjugate_exponent(p);
  rep.lhs = std::abs(lhs);
  rep.d_norm = shell_norm(d_profile, quad, cfg, rep.p);
  rep.u_norm = shell_norm(u_profile, quad, cfg, rep.p_conjugate);
  rep.prefactor = 1.0 / cfg.r0;
  rep.prefactor_sharp = 1.0 / cfg.r;
  rep.rhs = rep.prefactor * rep.d_norm * rep.u_norm;
  rep.rhs_sharp = rep.prefactor_sharp * rep.d_norm * rep.u_norm;
  rep.slack = rep.rhs - rep.lhs;
  rep.slack_sharp = rep.rhs_sharp - rep.lhs;
  return rep;
}

BoundReport theorem2_bound(const HarmonicField& f, const DiscreteSignedMeasure& sigma, const ShellConfig& cfg,
                           const QuadratureMeasure& quad, double p, double tol) {
  require_same_dim(f.dim(), sigma.dim(), "theorem2_bound");
  require_same_dim(f.dim(), quad.dim(), "theorem2_bound");
  require_inside_r0(f, cfg);
  conjugate_exponent(p);
  const double lhs = integrate_field(f, sigma.points(), sigma.weights());
  const FieldExpansion e = expand_field(f, cfg.r, tol);
  BoundReport rep = bound_from_profiles(lhs, apply_D_on(e, quad), potential_on_shell(sigma, cfg, quad), quad, cfg, p);
  rep.truncation = e.truncation;
  return rep;
}

double surrogate_budget(const HarmonicField& f, const QuadratureMeasure& mu_h) {
  // Degree-l part of f on S^d is bounded by |s| rho^l binom(l+d-2, l); the
  // surrogate integrates every degree <= D exactly, and each higher degree
  // integrates to zero under the surface measure.
  const SphereDim dim = f.dim();
  const int D = mu_h.degree();
  double b = 0.0;
  for (const auto& q : f.charges()) {
    const double rho = norm(q.location);
    if (rho == 0.0 || q.strength == 0.0) continue;
    double t = 0.0;
    for (int l = D + 1; l < D + 100000; ++l) {
      const double term = std::pow(rho, l) * gegenbauer_at_one(dim, l);
      t += term;
      if (term < 1e-18 * t) break;
    }
    b += std::abs(q.strength) * t;
  }
  return b * mu_h.total_mass();
}

BoundReport corollary3_error(const HarmonicField& f, const QuadratureMeasure& mu, const DiscreteSignedMeasure& nu,
                             const ShellConfig& cfg, const QuadratureMeasure& quad, double p, double tol) {
  require_same_dim(f.dim(), mu.dim(), "corollary3_error");
  require_same_dim(f.dim(), nu.dim(), "corollary3_error");
  require_same_dim(f.dim(), quad.dim(), "corollary3_error");
  require_inside_r0(f, cfg);
  conjugate_exponent(p);
  const double lhs =
      integrate_field(f, mu.points(), mu.weights()) - integrate_field(f, nu.points(), nu.weights());
  const FieldExpansion e = expand_field(f, cfg.r, tol);
  ShellProfile u = potential_on_shell(mu, cfg, quad);
  const ShellProfile unu = potential_on_shell(nu, cfg, quad);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= unu[i];
  BoundReport rep = bound_from_profiles(lhs, apply_D_on(e, quad), u, quad, cfg, p);
  rep.truncation = e.truncation;
  rep.surrogate_budget = surrogate_budget(f, mu);
  return rep;
}

double theorem4_bound(SphereDim dim, double mu_norm, double partition_norm, double r) {
  const int d = dim.value();
  return (d - 1) * mu_norm * partition_norm / std::pow(1.0 - r, d + 1);
}

std::vector<double> region_masses(const QuadratureMeasure& mu, const SpherePartition& partition) {
  require_same_dim(mu.dim(), partition.dim(), "region_masses");
  std::vector<std::size_t> owner(mu.size());
  parallel_for(mu.size(), [&](std::size_t i) { owner[i] = partition.locate(mu.points()[i]); }, 64);
  std::vector<double> a(partition.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) a[owner[i]] += mu.weights()[i];
  return a;
}

DiscreteSignedMeasure partition_rule(const QuadratureMeasure& mu, const SpherePartition& partition) {
  std::vector<double> a = region_masses(mu, partition);
  std::vector<SpherePoint> pts;
  pts.reserve(partition.size());
  for (std::size_t k = 0; k < partition.size(); ++k) {
    const auto& rep = partition.region(k).representative;
    if (!rep) throw MatchingError("region " + std::to_string(k) + " has no representative point", k);
    pts.push_back(*rep);
  }
  return {mu.dim(), std::move(pts), std::move(a), "partition rule"};
}

namespace {

Theorem4Report theorem4a_with_profile(const QuadratureMeasure& mu, const ShellProfile& mu_profile,
                                      const SpherePartition& matched, const ShellConfig& cfg,
                                      const QuadratureMeasure& quad) {
  const DiscreteSignedMeasure nu = partition_rule(mu, matched);
  Theorem4Report rep;
  rep.n = matched.size();
  rep.r = cfg.r;
  rep.mu_norm = mu.total_mass();
  rep.partition_norm = partition_norm(matched);
  rep.measured_sup = max_abs_difference(mu_profile, potential_on_shell(nu, cfg, quad));
  rep.bound = theorem4_bound(mu.dim(), rep.mu_norm, rep.partition_norm, cfg.r);
  rep.shell_nodes = quad.size();
  if (rep.measured_sup > rep.bound) rep.diagnosis = "measured sup exceeds the partition bound";
  return rep;
}

// Shell radius only matters here; r0 is irrelevant to the potential.
ShellConfig shell_at(double r) { return ShellConfig(0.5 * r, r); }

}  // namespace

Theorem4Report theorem4a_bound(const QuadratureMeasure& mu, const SpherePartition& matched, double r,
                               const QuadratureMeasure& quad) {
  require_same_dim(mu.dim(), quad.dim(), "theorem4a_bound");
  const ShellConfig cfg = shell_at(r);
  return theorem4a_with_profile(mu, potential_on_shell(mu, cfg, quad), matched, cfg, quad);
}

double gate_threshold(const Scattering& original, double mu_norm) {
  const SphereDim dim = original.dim();
  return (dim.value() - 1) * reference_reduction_constant(dim) * mu_norm * mesh_norm(original).upper();
}

Theorem4Report theorem4b_pipeline(const Scattering& original, const QuadratureMeasure& mu, double epsilon, double r0,
                                  const QuadratureMeasure& quad, int radii) {
  const SphereDim dim = original.dim();
  require_same_dim(dim, mu.dim(), "theorem4b_pipeline");
  require_same_dim(dim, quad.dim(), "theorem4b_pipeline");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(r0 > 0.0 && r0 < 1.0)) throw std::invalid_argument("r0 must lie in (0, 1)");
  if (radii < 1) throw std::invalid_argument("need at least one radius");
  if (original.empty()) throw std::invalid_argument("scattering is empty");
  const int d = dim.value();

  Theorem4Report rep;
  rep.epsilon = epsilon;
  rep.r0 = r0;
  rep.mu_norm = mu.total_mass();
  rep.mesh_norm = mesh_norm(original);
  rep.gate = (d - 1) * reference_reduction_constant(dim) * rep.mu_norm * rep.mesh_norm->upper() / epsilon;
  if (!(*rep.gate < 1.0)) {
    rep.diagnosis = "mesh norm too large for epsilon: (d-1) 8d sqrt(2d(d+1)) |mu| delta / epsilon = " +
                    std::to_string(*rep.gate) + " >= 1 with delta <= " + std::to_string(rep.mesh_norm->upper());
    throw GateFailure(rep.diagnosis, rep);
  }

  const Reduction red = reduce_scattering(original, dim);
  rep.n = red.reduced.size();
  rep.reduced_size = red.reduced.size();
  rep.reduction_constant = red.constant;
  rep.partition_norm = red.partition_norm;
  rep.partition_ratio = (d - 1) * rep.mu_norm * rep.partition_norm / epsilon;
  if (!(*rep.partition_ratio < 1.0)) {
    rep.diagnosis = "partition of the reduced scattering too coarse: (d-1) |mu| |R| / epsilon = " +
                    std::to_string(*rep.partition_ratio) + " >= 1";
    throw GateFailure(rep.diagnosis, rep);
  }
  rep.r_admissible_upper = 1.0 - std::pow(*rep.partition_ratio, 1.0 / (d + 1));
  if (!(*rep.r_admissible_upper > r0)) {
    rep.diagnosis = "radius window is empty: upper end " + std::to_string(*rep.r_admissible_upper) +
                    " <= r0 = " + std::to_string(r0);
    throw GateFailure(rep.diagnosis, rep);
  }

  const DiscreteSignedMeasure nu = partition_rule(mu, red.partition);
  const double hi = *rep.r_admissible_upper;
  rep.shell_nodes = quad.size();
  for (int i = 1; i <= radii; ++i) {
    const double r = r0 + (hi - r0) * i / (radii + 1.0);
    const ShellConfig cfg(r0, r);
    const double sup = max_abs_difference(potential_on_shell(mu, cfg, quad), potential_on_shell(nu, cfg, quad));
    rep.radii.push_back({r, sup, theorem4_bound(dim, rep.mu_norm, rep.partition_norm, r)});
    if (sup >= rep.measured_sup) {
      rep.measured_sup = sup;
      rep.r = r;
    }
  }
  rep.bound = theorem4_bound(dim, rep.mu_norm, rep.partition_norm, rep.radii.back().r);
  for (const auto& c : rep.radii) {
    if (c.measured_sup > epsilon) {
      rep.diagnosis = "sup |U^sigma| = " + std::to_string(c.measured_sup) + " exceeds epsilon at r = " +
                      std::to_string(c.r);
      break;
    }
  }
  return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingStudy scaling_study(SphereDim dim, const std::vector<std::size_t>& n_values, double r,
                           const QuadratureMeasure& mu, const QuadratureMeasure& quad) {
  require_same_dim(dim, mu.dim(), "scaling_study");
  require_same_dim(dim, quad.dim(), "scaling_study");
  if (!std::is_sorted(n_values.begin(), n_values.end())) throw std::invalid_argument("n values must be ascending");
  const ShellConfig cfg = shell_at(r);
  const ShellProfile mu_profile = potential_on_shell(mu, cfg, quad);

  ScalingStudy study;
  std::vector<double> ns, sups, norms;
  for (std::size_t n : n_values) {
    const SpherePartition p = equal_area_partition(dim, n);
    std::vector<SpherePoint> centers;
    for (const auto& reg : p.regions()) centers.push_back(reg.center);
    const Scattering e(dim, centers, "centers");
    const Theorem4Report t = theorem4a_with_profile(mu, mu_profile, match_partition_to_scattering(p, e), cfg, quad);
    ScalingRow row;
    row.n = n;
    row.mesh_norm = mesh_norm(e);
    row.partition_norm = t.partition_norm;
    row.measured_sup = t.measured_sup;
    row.bound = t.bound;
    study.rows.push_back(row);
    ns.push_back(static_cast<double>(n));
    sups.push_back(t.measured_sup);
    norms.push_back(t.partition_norm);
  }
  if (ns.size() >= 2) {
    study.sup_exponent = loglog_slope(ns, sups);
    study.partition_exponent = loglog_slope(ns, norms);
  }
  return study;
}

}  // namespace sphkh
