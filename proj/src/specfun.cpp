#include "sphkh/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphkh {

SphereDim::SphereDim(int d) : d_(d) {
  if (d < 2) throw std::invalid_argument("sphere dimension must satisfy d >= 2, got " + std::to_string(d));
}

double sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("sphere_area: negative dimension");
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double surface_area(SphereDim dim) { return sphere_area(dim.value()); }

std::uint64_t harmonic_dim(SphereDim dim, int l) {
  if (l < 0) throw std::invalid_argument("harmonic_dim: negative degree");
  if (l == 0) return 1;
  __extension__ using u128 = unsigned __int128;
  constexpr u128 kMax = std::numeric_limits<std::uint64_t>::max();
  const int d = dim.value();
  // binom(l + d - 2, d - 2), built so every partial product is an exact binomial.
  const int k = d - 2;
  u128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<u128>(l + i) / static_cast<u128>(i);
    if (c > kMax) throw std::overflow_error("harmonic_dim: binomial overflows 64 bits");
  }
  const u128 z = static_cast<u128>(2 * static_cast<std::int64_t>(l) + d - 1) * c / static_cast<u128>(d - 1);
  if (z > kMax) throw std::overflow_error("harmonic_dim: Z(d,l) overflows 64 bits");
  return static_cast<std::uint64_t>(z);
}

double gegenbauer_at_one(SphereDim dim, int l) {
  if (l < 0) throw std::invalid_argument("gegenbauer_at_one: negative degree");
  double c = 1.0;
  for (int i = 1; i <= dim.value() - 2; ++i) c *= static_cast<double>(l + i) / i;
  return c;
}

void legendre_fill(SphereDim dim, int max_l, double t, double* out) {
  if (max_l < 0) return;
  out[0] = 1.0;
  if (max_l == 0) return;
  out[1] = t;
  const int d = dim.value();
  // Normalized ultraspherical recurrence; at t = 1 every step is exactly 1.
  for (int n = 1; n < max_l; ++n) {
    out[n + 1] = (static_cast<double>(2 * n + d - 1) * t * out[n] - static_cast<double>(n) * out[n - 1]) /
                 static_cast<double>(n + d - 1);
  }
}

namespace {
void check_argument(double t) {
  if (!(std::abs(t) <= 1.0)) throw std::domain_error("legendre: argument outside [-1, 1]");
}
}  // namespace

std::vector<double> legendre_all(SphereDim dim, int max_l, double t) {
  check_argument(t);
  if (max_l < 0) throw std::invalid_argument("legendre_all: negative degree");
  std::vector<double> out(static_cast<std::size_t>(max_l) + 1);
  legendre_fill(dim, max_l, t, out.data());
  return out;
}

double legendre(SphereDim dim, int l, double t) {
  check_argument(t);
  if (l < 0) throw std::invalid_argument("legendre: negative degree");
  if (l == 0) return 1.0;
  double prev = 1.0, cur = t;
  const int d = dim.value();
  for (int n = 1; n < l; ++n) {
    const double next =
        (static_cast<double>(2 * n + d - 1) * t * cur - static_cast<double>(n) * prev) / static_cast<double>(n + d - 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

double gegenbauer(SphereDim dim, int l, double t) { return gegenbauer_at_one(dim, l) * legendre(dim, l, t); }

double kernel_coefficient(SphereDim dim, int l, double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("kernel_coefficient: radius must lie in (0, 1)");
  if (l < 0) throw std::invalid_argument("kernel_coefficient: negative degree");
  const int d = dim.value();
  return (d - 1) * surface_area(dim) / (2.0 * l + d - 1) * std::pow(r, l);
}

std::vector<KernelCoefficient> kernel_coefficients(SphereDim dim, int max_l, double r) {
  std::vector<KernelCoefficient> out;
  out.reserve(static_cast<std::size_t>(max_l) + 1);
  for (int l = 0; l <= max_l; ++l) out.push_back({l, kernel_coefficient(dim, l, r)});
  return out;
}

double harmonic_dim_value(SphereDim dim, int l) {
  if (l == 0) return 1.0;
  const int d = dim.value();
  return (2.0 * l + d - 1) * gegenbauer_at_one(dim, l) / (d - 1);
}

double legendre_derivative_at_one(SphereDim dim, int l) {
  if (l < 0) throw std::invalid_argument("legendre_derivative_at_one: negative degree");
  const double d = dim.value();
  return l * (l + d - 1.0) / d;
}

Truncation kernel_truncation(SphereDim dim, double r, double tol) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("kernel_truncation: radius must lie in (0, 1)");
  return truncate_series([&](int l) { return gegenbauer_at_one(dim, l) * std::pow(r, l); }, tol);
}

namespace {

// Monic recurrence coefficient beta_k of the symmetric Jacobi family (alpha, alpha).
double jacobi_beta(int k, double alpha) {
  if (k == 1 && alpha == -0.5) return 0.5;
  const double s = 2.0 * k + 2.0 * alpha;
  return k * (k + 2.0 * alpha) / ((s + 1.0) * (s - 1.0));
}

struct OrthoEval {
  double value;       // q_n(t)
  double derivative;  // q_n'(t)
  double christoffel; // sum_{k<n} q_k(t)^2
};

OrthoEval evaluate_orthonormal(int n, double t, double mu0, const std::vector<double>& sqrt_beta) {
  double q_prev = 0.0, q = 1.0 / std::sqrt(mu0);
  double dq_prev = 0.0, dq = 0.0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += q * q;
    const double b_k = k > 0 ? sqrt_beta[k] : 0.0;
    const double b_next = sqrt_beta[k + 1];
    const double q_next = (t * q - b_k * q_prev) / b_next;
    const double dq_next = (q + t * dq - b_k * dq_prev) / b_next;
    q_prev = q;
    q = q_next;
    dq_prev = dq;
    dq = dq_next;
  }
  return {q, dq, sum};
}

}  // namespace

GaussRule gauss_gegenbauer(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_gegenbauer: need at least one node");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_gegenbauer: alpha must exceed -1");

  const double mu0 = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.5));
  std::vector<double> sqrt_beta(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) sqrt_beta[k] = std::sqrt(jacobi_beta(k, alpha));

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = mu0;
    return rule;
  }

  // Golub-Welsch for starting values, then Newton on q_n and Christoffel weights.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = sqrt_beta[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& eig = solver.eigenvalues();

  for (int i = 0; i < n; ++i) {
    double t = eig[i];
    for (int it = 0; it < 8; ++it) {
      const OrthoEval e = evaluate_orthonormal(n, t, mu0, sqrt_beta);
      const double step = e.value / e.derivative;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = t;
    rule.weights[i] = 1.0 / evaluate_orthonormal(n, t, mu0, sqrt_beta).christoffel;
  }
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace sphkh
