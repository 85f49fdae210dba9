#pragma once

// Exterior-harmonic test fields built from interior point charges, their
// zonal expansions on S^d, the coefficient multiplier D, Sobolev norms H_s,
// the Funk-Hecke transform and the pointwise embedding constants.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sphkh/measures.hpp"
#include "sphkh/specfun.hpp"
#include "sphkh/sphere_geom.hpp"

namespace sphkh {

struct PointCharge {
  std::vector<double> location;
  double strength = 0.0;
};

/// f(x) = sum_j strength_j |x - q_j|^{1-d}; harmonic outside the ball of
/// radius rho_max and zero at infinity.
class HarmonicField {
 public:
  HarmonicField(SphereDim dim, std::vector<PointCharge> charges);

  SphereDim dim() const noexcept { return dim_; }
  const std::vector<PointCharge>& charges() const noexcept { return charges_; }
  double rho_max() const noexcept { return rho_max_; }
  HarmonicField scaled(double alpha) const;

 private:
  SphereDim dim_;
  std::vector<PointCharge> charges_;
  double rho_max_ = 0.0;
};

/// Rejects any charge with |q| >= 1.
HarmonicField make_field(SphereDim dim, std::vector<PointCharge> charges);

/// Throws SingularityError at a charge location.
double evaluate_field(const HarmonicField& f, std::span<const double> x);

/// f_r(zeta) = f(r zeta) as a sum of zonal pieces, one per charge:
/// coeffs[l] = strength r^{1-d} (rho/r)^l (d-1) omega_d / (2l + d - 1).
struct FieldExpansion {
  SphereDim dim;
  double r = 0.0;
  int truncation = 0;
  /// Certified bounds on the discarded tails of f_r and of D(f_r).
  double tail_bound = 0.0;
  double d_tail_bound = 0.0;
  std::vector<ZonalCoefficients> pieces;
  /// strength r^{1-d} and rho / r for each piece; coefficients of any degree follow from these.
  std::vector<double> amplitudes;
  std::vector<double> ratios;

  double coefficient(std::size_t piece, int l) const;
  double max_ratio() const;
};

/// Truncates where both tails drop below tol. Throws DivergenceError if r <= rho_max.
FieldExpansion expand_field(const HarmonicField& f, double r, double tol = 1e-12);

/// Reconstruction sum_l coeffs[l] (Z(d,l)/omega_d) P_l(d+1, pole . zeta).
double evaluate_expansion(const FieldExpansion& e, const SpherePoint& zeta);

/// D(f_r)(zeta): degree-l pieces multiplied by (2l + d - 1) / ((d - 1) omega_d).
double apply_D(const FieldExpansion& e, const SpherePoint& zeta);

/// Vectorized forms over the nodes of a quadrature.
std::vector<double> evaluate_expansion_on(const FieldExpansion& e, const QuadratureMeasure& quad);
std::vector<double> apply_D_on(const FieldExpansion& e, const QuadratureMeasure& quad);

/// lambda_l = (omega_{d-1} / omega_d) int f(t) P_l(d+1, t) (1 - t^2)^{(d-2)/2} dt.
struct FunkHeckeResult {
  double lambda = 0.0;
  int nodes = 0;
};

/// Gauss-Gegenbauer with 2 l + 20 nodes unless `nodes` is given.
FunkHeckeResult funk_hecke(const std::function<double(double)>& kernel, int l, SphereDim dim, int nodes = 0);

/// Smoothness s > d/2 with weights m_0 = 1, m_l = l^s (2l + d - 1) / ((d - 1) omega_d).
class SobolevParams {
 public:
  SobolevParams(double s, SphereDim dim);

  double s() const noexcept { return s_; }
  SphereDim dim() const noexcept { return dim_; }
  double weight(int l) const;

 private:
  double s_;
  SphereDim dim_;
};

/// (sum_{l,k} fhat(l,k)^2 m_l^2)^{1/2}; the k-sums collapse through the addition formula.
double sobolev_norm(const FieldExpansion& e, const SobolevParams& sp);

struct EmbeddingConstants {
  double c_star = 0.0;
  double c_star_star = 0.0;
  double s = 0.0;
  int d = 0;
  /// Integral-test bounds on the omitted tails, relative to the partial sums.
  double tail_star = 0.0;
  double tail_star_star = 0.0;
  long terms = 0;
};

/// Sup-norm embedding constants for f_r and D(f_r); tails are added to the
/// partial sums, so both values are upper bounds.
EmbeddingConstants embedding_constants(const SobolevParams& sp);

struct LipschitzReport {
  double max_ratio = 0.0;
  /// constant * ||f_r||_{H_s}
  double bound = 0.0;
  double constant = 0.0;
  double hs_norm = 0.0;
  std::size_t pairs = 0;
};

/// Explicit Lipschitz constant: [sum_{l>=1} m_l^{-2} Z(d,l) P_l'(d+1, 1) / omega_d]^{1/2}.
/// Requires s > (3d - 2)/4.
double lipschitz_constant(const SobolevParams& sp);

LipschitzReport lipschitz_check(const FieldExpansion& e, const SobolevParams& sp,
                                std::span<const std::pair<SpherePoint, SpherePoint>> pairs);

}  // namespace sphkh
