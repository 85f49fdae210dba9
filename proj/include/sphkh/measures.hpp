#pragma once

// Signed measures on S^d, their Newtonian potentials U^sigma(x) =
// int |x - y|^{1-d} dsigma(y), norms of potentials on inner shells r S^d,
// and the zonal coefficient law of balayage onto r S^d.

#include <span>
#include <string>
#include <vector>

#include "sphkh/specfun.hpp"
#include "sphkh/sphere_geom.hpp"

namespace sphkh {

/// Finite sum of weighted Dirac masses on S^d.
class DiscreteSignedMeasure {
 public:
  DiscreteSignedMeasure(SphereDim dim, std::vector<SpherePoint> atoms, std::vector<double> weights,
                        std::string label = {});

  SphereDim dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<SpherePoint>& points() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::string& label() const noexcept { return label_; }

  /// sum |w|
  double total_variation() const;
  /// sum w
  double total_mass() const;
  DiscreteSignedMeasure positive_part() const;
  /// sigma^- as a nonnegative measure.
  DiscreteSignedMeasure negative_part() const;
  DiscreteSignedMeasure scaled(double alpha) const;

  /// alpha * this + beta * other, atoms concatenated (no merging).
  DiscreteSignedMeasure combined(double alpha, const DiscreteSignedMeasure& other, double beta) const;

 private:
  SphereDim dim_;
  std::vector<SpherePoint> atoms_;
  std::vector<double> weights_;
  std::string label_;
};

/// Positive-weight cubature on S^d standing in for a continuous measure. The
/// product rule represents mu_d (weights sum to omega_d) and integrates
/// polynomials up to `degree()` exactly.
class QuadratureMeasure {
 public:
  QuadratureMeasure(SphereDim dim, std::vector<SpherePoint> nodes, std::vector<double> weights, int degree);

  /// Gauss-Gegenbauer in the polar coordinate times the rule for S^{d-1},
  /// down to equispaced azimuths on S^1. Symmetric under x -> -x.
  static QuadratureMeasure product_rule(SphereDim dim, int degree);

  SphereDim dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<SpherePoint>& points() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double total_mass() const;

  /// Same nodes, weights multiplied by alpha > 0 (sigma_d = mu_d scaled by 1/omega_d).
  QuadratureMeasure scaled(double alpha) const;
  DiscreteSignedMeasure as_signed(std::string label = "quadrature") const;

 private:
  SphereDim dim_;
  std::vector<SpherePoint> nodes_;
  std::vector<double> weights_;
  int degree_;
};

/// 0 < r0 < r < 1; the shell r S^d bounds G = R^{d+1} minus the closed ball of radius r.
struct ShellConfig {
  double r0;
  double r;

  ShellConfig(double r0, double r);
};

/// Degree-l components of a zonal object: sum_l coeffs[l] (Z(d,l)/omega_d) P_l(d+1, pole . zeta).
struct ZonalCoefficients {
  SpherePoint pole;
  std::vector<double> coeffs;
};

/// Distance below which evaluation at an atom is refused.
inline constexpr double kSingularityGuard = 1e-12;

double newtonian_potential(const DiscreteSignedMeasure& sigma, std::span<const double> x);
double newtonian_potential(const QuadratureMeasure& sigma, std::span<const double> x);

using ShellProfile = std::vector<double>;

/// U^sigma(r zeta_i) for every node zeta_i of quad.
ShellProfile potential_on_shell(const DiscreteSignedMeasure& sigma, const ShellConfig& cfg, const QuadratureMeasure& quad);
ShellProfile potential_on_shell(const QuadratureMeasure& sigma, const ShellConfig& cfg, const QuadratureMeasure& quad);

/// L_p norm on r S^d with surface measure r^d dmu_d; p = infinity gives the max.
double shell_norm(const ShellProfile& profile, const QuadratureMeasure& quad, const ShellConfig& cfg, double p);

/// Delta mass at p in zonal normal form: every coefficient equals one.
ZonalCoefficients zonal_coefficients_of_atom(const SpherePoint& p, int truncation);

/// Coefficients of the balayage onto r S^d: coeffs[l] scaled by r^{l+d-1}.
ZonalCoefficients balayage_transform(const ZonalCoefficients& zc, SphereDim dim, const ShellConfig& cfg);

/// Potential at r zeta of a measure on S^d given in zonal form (direct expansion).
double potential_from_zonal(const ZonalCoefficients& zc, SphereDim dim, double r, const SpherePoint& zeta);

/// Potential at r zeta of a measure living on r S^d, from its balayage coefficients.
double potential_from_balayage(const ZonalCoefficients& balayaged, SphereDim dim, double r, const SpherePoint& zeta);

}  // namespace sphkh
