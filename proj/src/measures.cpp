#include "sphkh/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphkh/error.hpp"
#include "sphkh/parallel.hpp"

namespace sphkh {

namespace {

void check_points(SphereDim dim, const std::vector<SpherePoint>& pts, std::size_t nweights, const char* what) {
  if (pts.size() != nweights) throw std::invalid_argument(std::string(what) + ": points and weights differ in length");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].ambient_dim() != static_cast<std::size_t>(dim.ambient())) {
      throw std::invalid_argument(std::string(what) + ": point " + std::to_string(i) + " has wrong dimension");
    }
  }
}

// |x - y|^{1-d} from the squared distance.
inline double kernel_from_sq(double sq, int d) {
  switch (d) {
    case 2: return 1.0 / std::sqrt(sq);
    case 3: return 1.0 / sq;
    case 4: return 1.0 / (sq * std::sqrt(sq));
    default: return std::pow(sq, 0.5 * (1 - d));
  }
}

struct FlatMasses {
  std::size_t amb;
  std::vector<double> coords;
  std::vector<double> weights;
};

FlatMasses flatten(const std::vector<SpherePoint>& pts, const std::vector<double>& w, SphereDim dim) {
  FlatMasses f{static_cast<std::size_t>(dim.ambient()), {}, w};
  f.coords.resize(pts.size() * f.amb);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::copy(pts[i].coords().begin(), pts[i].coords().end(), f.coords.begin() + i * f.amb);
  }
  return f;
}

double potential_sum(const FlatMasses& m, const double* x, int d, bool guard) {
  double s = 0.0;
  const std::size_t n = m.weights.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* y = m.coords.data() + i * m.amb;
    double sq = 0.0;
    for (std::size_t k = 0; k < m.amb; ++k) {
      const double diff = x[k] - y[k];
      sq += diff * diff;
    }
    if (guard && sq <= kSingularityGuard * kSingularityGuard) {
      throw SingularityError("potential evaluated at atom " + std::to_string(i));
    }
    s += m.weights[i] * kernel_from_sq(sq, d);
  }
  return s;
}

double potential(const std::vector<SpherePoint>& pts, const std::vector<double>& w, SphereDim dim,
                 std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(dim.ambient())) throw std::invalid_argument("newtonian_potential: dimension mismatch");
  const FlatMasses m = flatten(pts, w, dim);
  return potential_sum(m, x.data(), dim.value(), true);
}

ShellProfile shell_profile(const std::vector<SpherePoint>& pts, const std::vector<double>& w, SphereDim dim,
                           const ShellConfig& cfg, const QuadratureMeasure& quad) {
  if (quad.dim() != dim) throw std::invalid_argument("potential_on_shell: dimension mismatch");
  const FlatMasses m = flatten(pts, w, dim);
  const std::size_t amb = m.amb;
  ShellProfile out(quad.size());
  // Atoms sit on S^d and evaluation points on r S^d with r < 1: never singular.
  parallel_for(quad.size(), [&](std::size_t i) {
    double x[16];
    std::vector<double> big;
    double* xp = x;
    if (amb > 16) {
      big.resize(amb);
      xp = big.data();
    }
    const auto z = quad.points()[i].coords();
    for (std::size_t k = 0; k < amb; ++k) xp[k] = cfg.r * z[k];
    out[i] = potential_sum(m, xp, dim.value(), false);
  }, 64);
  return out;
}

// Product rule on S^k for k >= 1, flattened.
void product_nodes(int k, int degree, std::vector<double>& coords, std::vector<double>& weights) {
  if (k == 1) {
    int n = degree + 1;
    if (n % 2) ++n;
    coords.resize(2 * static_cast<std::size_t>(n));
    weights.assign(n, 2.0 * std::numbers::pi / n);
    for (int j = 0; j < n; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / n;
      coords[2 * j] = std::cos(phi);
      coords[2 * j + 1] = std::sin(phi);
    }
    // Exact antipodal pairs j <-> j + n/2.
    for (int j = 0; j < n / 2; ++j) {
      coords[2 * (j + n / 2)] = -coords[2 * j];
      coords[2 * (j + n / 2) + 1] = -coords[2 * j + 1];
    }
    return;
  }
  std::vector<double> inner_c, inner_w;
  product_nodes(k - 1, degree, inner_c, inner_w);
  const GaussRule t = gauss_gegenbauer(degree / 2 + 1, 0.5 * (k - 2));
  const std::size_t amb = static_cast<std::size_t>(k) + 1, inner_amb = static_cast<std::size_t>(k);
  const std::size_t m = inner_w.size();
  coords.resize(t.nodes.size() * m * amb);
  weights.resize(t.nodes.size() * m);
  std::size_t idx = 0;
  for (std::size_t a = 0; a < t.nodes.size(); ++a) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t.nodes[a] * t.nodes[a]));
    for (std::size_t b = 0; b < m; ++b, ++idx) {
      coords[idx * amb] = t.nodes[a];
      for (std::size_t c = 0; c < inner_amb; ++c) coords[idx * amb + 1 + c] = s * inner_c[b * inner_amb + c];
      weights[idx] = t.weights[a] * inner_w[b];
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

DiscreteSignedMeasure::DiscreteSignedMeasure(SphereDim dim, std::vector<SpherePoint> atoms, std::vector<double> weights,
                                             std::string label)
    : dim_(dim), atoms_(std::move(atoms)), weights_(std::move(weights)), label_(std::move(label)) {
  check_points(dim_, atoms_, weights_.size(), "DiscreteSignedMeasure");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("DiscreteSignedMeasure: non-finite weight");
  }
}

double DiscreteSignedMeasure::total_variation() const {
  double s = 0.0;
  for (double w : weights_) s += std::abs(w);
  return s;
}

double DiscreteSignedMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

DiscreteSignedMeasure DiscreteSignedMeasure::positive_part() const {
  std::vector<SpherePoint> a;
  std::vector<double> w;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (weights_[i] > 0) {
      a.push_back(atoms_[i]);
      w.push_back(weights_[i]);
    }
  }
  return {dim_, std::move(a), std::move(w), label_ + "+"};
}

DiscreteSignedMeasure DiscreteSignedMeasure::negative_part() const {
  std::vector<SpherePoint> a;
  std::vector<double> w;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (weights_[i] < 0) {
      a.push_back(atoms_[i]);
      w.push_back(-weights_[i]);
    }
  }
  return {dim_, std::move(a), std::move(w), label_ + "-"};
}

DiscreteSignedMeasure DiscreteSignedMeasure::scaled(double alpha) const {
  std::vector<double> w(weights_);
  for (double& v : w) v *= alpha;
  return {dim_, atoms_, std::move(w), label_};
}

DiscreteSignedMeasure DiscreteSignedMeasure::combined(double alpha, const DiscreteSignedMeasure& other,
                                                      double beta) const {
  if (other.dim_ != dim_) throw std::invalid_argument("combined: dimension mismatch");
  std::vector<SpherePoint> a(atoms_);
  a.insert(a.end(), other.atoms_.begin(), other.atoms_.end());
  std::vector<double> w;
  w.reserve(a.size());
  for (double v : weights_) w.push_back(alpha * v);
  for (double v : other.weights_) w.push_back(beta * v);
  return {dim_, std::move(a), std::move(w), label_};
}

QuadratureMeasure::QuadratureMeasure(SphereDim dim, std::vector<SpherePoint> nodes, std::vector<double> weights,
                                     int degree)
    : dim_(dim), nodes_(std::move(nodes)), weights_(std::move(weights)), degree_(degree) {
  check_points(dim_, nodes_, weights_.size(), "QuadratureMeasure");
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("QuadratureMeasure: weights must be positive");
  }
}

QuadratureMeasure QuadratureMeasure::product_rule(SphereDim dim, int degree) {
  if (degree < 0) throw std::invalid_argument("product_rule: negative degree");
  std::vector<double> coords, weights;
  product_nodes(dim.value(), degree, coords, weights);
  const std::size_t amb = static_cast<std::size_t>(dim.ambient());
  std::vector<SpherePoint> nodes;
  nodes.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    nodes.emplace_back(std::vector<double>(coords.begin() + i * amb, coords.begin() + (i + 1) * amb));
  }
  return {dim, std::move(nodes), std::move(weights), degree};
}

double QuadratureMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

QuadratureMeasure QuadratureMeasure::scaled(double alpha) const {
  std::vector<double> w(weights_);
  for (double& v : w) v *= alpha;
  return {dim_, nodes_, std::move(w), degree_};
}

DiscreteSignedMeasure QuadratureMeasure::as_signed(std::string label) const {
  return {dim_, nodes_, weights_, std::move(label)};
}

ShellConfig::ShellConfig(double r0_, double r_) : r0(r0_), r(r_) {
  if (!(0.0 < r0 && r0 < r && r < 1.0)) {
    throw std::invalid_argument("shell configuration requires 0 < r0 < r < 1");
  }
}

double newtonian_potential(const DiscreteSignedMeasure& sigma, std::span<const double> x) {
  return potential(sigma.points(), sigma.weights(), sigma.dim(), x);
}

double newtonian_potential(const QuadratureMeasure& sigma, std::span<const double> x) {
  return potential(sigma.points(), sigma.weights(), sigma.dim(), x);
}

ShellProfile potential_on_shell(const DiscreteSignedMeasure& sigma, const ShellConfig& cfg,
                                const QuadratureMeasure& quad) {
  return shell_profile(sigma.points(), sigma.weights(), sigma.dim(), cfg, quad);
}

ShellProfile potential_on_shell(const QuadratureMeasure& sigma, const ShellConfig& cfg, const QuadratureMeasure& quad) {
  return shell_profile(sigma.points(), sigma.weights(), sigma.dim(), cfg, quad);
}

double shell_norm(const ShellProfile& profile, const QuadratureMeasure& quad, const ShellConfig& cfg, double p) {
  if (profile.size() != quad.size()) throw std::invalid_argument("shell_norm: profile and quadrature differ in length");
  if (!(p >= 1.0)) throw std::invalid_argument("shell_norm: exponent must satisfy p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : profile) m = std::max(m, std::abs(v));
    return m;
  }
  const double scale = std::pow(cfg.r, quad.dim().value());
  double s = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) s += quad.weights()[i] * std::pow(std::abs(profile[i]), p);
  return std::pow(scale * s, 1.0 / p);
}

ZonalCoefficients zonal_coefficients_of_atom(const SpherePoint& p, int truncation) {
  if (truncation < 0) throw std::invalid_argument("zonal_coefficients_of_atom: negative truncation");
  return {p, std::vector<double>(static_cast<std::size_t>(truncation) + 1, 1.0)};
}

ZonalCoefficients balayage_transform(const ZonalCoefficients& zc, SphereDim dim, const ShellConfig& cfg) {
  ZonalCoefficients out = zc;
  double scale = std::pow(cfg.r, dim.value() - 1);
  for (double& c : out.coeffs) {
    c *= scale;
    scale *= cfg.r;
  }
  return out;
}

namespace {

template <class Weight>
double zonal_sum(const ZonalCoefficients& zc, SphereDim dim, const SpherePoint& zeta, Weight&& weight) {
  const int L = static_cast<int>(zc.coeffs.size()) - 1;
  if (L < 0) return 0.0;
  const double t = std::clamp(dot(zc.pole.coords(), zeta.coords()), -1.0, 1.0);
  std::vector<double> P(static_cast<std::size_t>(L) + 1);
  legendre_fill(dim, L, t, P.data());
  const double omega = surface_area(dim);
  double s = 0.0;
  for (int l = L; l >= 0; --l) {
    s += weight(l) * zc.coeffs[l] * harmonic_dim_value(dim, l) / omega * P[l];
  }
  return s;
}

}  // namespace

double potential_from_zonal(const ZonalCoefficients& zc, SphereDim dim, double r, const SpherePoint& zeta) {
  return zonal_sum(zc, dim, zeta, [&](int l) { return kernel_coefficient(dim, l, r); });
}

double potential_from_balayage(const ZonalCoefficients& balayaged, SphereDim dim, double r, const SpherePoint& zeta) {
  const int d = dim.value();
  const double omega = surface_area(dim);
  const double rs = std::pow(r, d - 1);
  return zonal_sum(balayaged, dim, zeta, [&](int l) { return (d - 1) * omega / ((2.0 * l + d - 1) * rs); });
}

}  // namespace sphkh
