#pragma once

// Special functions on S^d: surface areas, harmonic-space dimensions,
// ultraspherical (Legendre in d+1 dimensions) and Gegenbauer polynomials,
// the coefficients of the Newtonian kernel expansion, and Gauss rules for
// the weight (1 - t^2)^alpha.

#include <cstdint>
#include <vector>

namespace sphkh {

/// Dimension d of the sphere S^d embedded in R^{d+1}; always d >= 2.
class SphereDim {
 public:
  explicit SphereDim(int d);

  int value() const noexcept { return d_; }
  int ambient() const noexcept { return d_ + 1; }
  /// Gegenbauer index (d-1)/2 of the ultraspherical family on S^d.
  double lambda() const noexcept { return 0.5 * (d_ - 1); }

  friend bool operator==(SphereDim, SphereDim) = default;

 private:
  int d_;
};

/// Area of S^k for any k >= 0 (omega_0 = 2, omega_1 = 2 pi). The lower
/// spheres only appear as Funk-Hecke prefactors and collar cross-sections.
double sphere_area(int k);

/// omega_d = 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double surface_area(SphereDim dim);

/// Z(d, l), exact. Throws std::overflow_error when the value leaves uint64.
std::uint64_t harmonic_dim(SphereDim dim, int l);

/// Z(d, l) in floating point, for loops that run past the uint64 range.
double harmonic_dim_value(SphereDim dim, int l);

/// binom(l + d - 2, l) = P_l^{(d-1)/2}(1), as a double.
double gegenbauer_at_one(SphereDim dim, int l);

/// P_l(d+1, t), normalized to P_l(d+1, 1) = 1. Requires |t| <= 1.
double legendre(SphereDim dim, int l, double t);

/// P_0(d+1, t), ..., P_max_l(d+1, t) from one pass of the recurrence.
std::vector<double> legendre_all(SphereDim dim, int max_l, double t);

/// In-place variant used in hot loops; out must hold max_l + 1 values.
void legendre_fill(SphereDim dim, int max_l, double t, double* out);

/// Gegenbauer P_l^{(d-1)/2}(t) = binom(l+d-2, l) * P_l(d+1, t).
double gegenbauer(SphereDim dim, int l, double t);

/// Weight (d-1) omega_d / (2l + d - 1) * r^l carried by degree l in the
/// expansion of |r zeta - eta|^{1-d} against the addition kernel.
struct KernelCoefficient {
  int l;
  double value;
};

double kernel_coefficient(SphereDim dim, int l, double r);
std::vector<KernelCoefficient> kernel_coefficients(SphereDim dim, int max_l, double r);

/// P_l'(d+1, 1) = l (l + d - 1) / d.
double legendre_derivative_at_one(SphereDim dim, int l);

/// Truncation of a positive series sum_l term(l) whose successive ratios are
/// nonincreasing: the first L with sum_{l > L} term(l) <= tail < tol.
struct Truncation {
  int degree = 0;
  double tail_bound = 0.0;
};

template <class Term>
Truncation truncate_series(Term&& term, double tol, int max_degree = 100000) {
  for (int L = 0; L < max_degree; ++L) {
    const double a = term(L + 1);
    if (a == 0.0) return {L, 0.0};
    const double q = term(L + 2) / a;
    if (q < 1.0) {
      const double tail = a / (1.0 - q);
      if (tail < tol) return {L, tail};
    }
  }
  return {max_degree, -1.0};
}

/// Truncation degree for sum_l kernel_coefficient(l, r) (Z(d,l)/omega_d) P_l,
/// whose degree-l term is bounded by binom(l+d-2, l) r^l.
Truncation kernel_truncation(SphereDim dim, double r, double tol = 1e-12);

/// Gauss rule on [-1, 1] for the weight (1 - t^2)^alpha, alpha > -1.
/// Nodes ascending and exactly antisymmetric; weights sum to the weight's mass.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_gegenbauer(int n, double alpha);
inline GaussRule gauss_legendre(int n) { return gauss_gegenbauer(n, 0.0); }

}  // namespace sphkh
