#include "sphkh/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sphkh/error.hpp"
#include "sphkh/parallel.hpp"

namespace sphkh {

HarmonicField::HarmonicField(SphereDim dim, std::vector<PointCharge> charges)
    : dim_(dim), charges_(std::move(charges)) {
  for (std::size_t j = 0; j < charges_.size(); ++j) {
    const auto& q = charges_[j];
    if (q.location.size() != static_cast<std::size_t>(dim.ambient())) {
      throw std::invalid_argument("charge " + std::to_string(j) + " has wrong dimension");
    }
    const double rho = norm(q.location);
    if (!(rho < 1.0)) {
      throw std::invalid_argument("charge " + std::to_string(j) + " lies on or outside the unit sphere");
    }
    if (!std::isfinite(q.strength)) throw std::invalid_argument("charge " + std::to_string(j) + " has non-finite strength");
    rho_max_ = std::max(rho_max_, rho);
  }
}

HarmonicField HarmonicField::scaled(double alpha) const {
  std::vector<PointCharge> c(charges_);
  for (auto& q : c) q.strength *= alpha;
  return {dim_, std::move(c)};
}

HarmonicField make_field(SphereDim dim, std::vector<PointCharge> charges) { return {dim, std::move(charges)}; }

double evaluate_field(const HarmonicField& f, std::span<const double> x) {
  const int d = f.dim().value();
  if (x.size() != static_cast<std::size_t>(d + 1)) throw std::invalid_argument("evaluate_field: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < f.charges().size(); ++j) {
    const auto& q = f.charges()[j];
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double diff = x[k] - q.location[k];
      sq += diff * diff;
    }
    if (sq <= kSingularityGuard * kSingularityGuard) {
      throw SingularityError("field evaluated at charge " + std::to_string(j));
    }
    s += q.strength * std::pow(sq, 0.5 * (1 - d));
  }
  return s;
}

// ---------------------------------------------------------------------------

double FieldExpansion::coefficient(std::size_t piece, int l) const {
  const int d = dim.value();
  return amplitudes[piece] * std::pow(ratios[piece], l) * (d - 1) * surface_area(dim) / (2.0 * l + d - 1);
}

double FieldExpansion::max_ratio() const {
  double m = 0.0;
  for (double q : ratios) m = std::max(m, q);
  return m;
}

namespace {

// Bound on sum_{l > L} of a positive term sequence with nonincreasing ratios.
template <class Term>
double tail_after(Term&& term, int L) {
  const double a = term(L + 1);
  if (a == 0.0) return 0.0;
  const double q = term(L + 2) / a;
  if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
  return a / (1.0 - q);
}

}  // namespace

FieldExpansion expand_field(const HarmonicField& f, double r, double tol) {
  const SphereDim dim = f.dim();
  const int d = dim.value();
  if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("expand_field: radius must lie in (0, 1]");
  if (!(r > f.rho_max())) {
    throw DivergenceError("expansion radius " + std::to_string(r) + " does not exceed the charge radius " +
                          std::to_string(f.rho_max()));
  }
  if (!(tol > 0.0)) throw std::invalid_argument("expand_field: tolerance must be positive");
  const double omega = surface_area(dim);

  FieldExpansion e{dim, 0.0, 0, 0.0, 0.0, {}, {}, {}};
  e.r = r;
  for (const auto& q : f.charges()) {
    const double rho = norm(q.location);
    e.amplitudes.push_back(q.strength * std::pow(r, 1 - d));
    e.ratios.push_back(rho / r);
  }

  // Degree-l terms are bounded by |a| q^l Z(d,l) / omega (for D) and
  // |a| q^l binom(l+d-2, l) (for f_r) since |P_l| <= 1.
  auto total_tail = [&](int L, bool for_d) {
    double t = 0.0;
    for (std::size_t j = 0; j < e.amplitudes.size(); ++j) {
      const double a = std::abs(e.amplitudes[j]), q = e.ratios[j];
      if (a == 0.0 || q == 0.0) continue;
      t += tail_after([&](int l) {
        return a * std::pow(q, l) * (for_d ? harmonic_dim_value(dim, l) / omega : gegenbauer_at_one(dim, l));
      }, L);
    }
    return t;
  };
  int L = 0;
  constexpr int kMaxDegree = 20000;
  while (L < kMaxDegree && !(total_tail(L, true) < tol && total_tail(L, false) < tol)) ++L;
  if (L == kMaxDegree) throw DivergenceError("expand_field: truncation degree exceeds limit; charges too close to r");
  e.truncation = L;
  e.tail_bound = total_tail(L, false);
  e.d_tail_bound = total_tail(L, true);

  for (std::size_t j = 0; j < f.charges().size(); ++j) {
    const auto& q = f.charges()[j];
    const double rho = norm(q.location);
    SpherePoint pole = rho > 0.0 ? SpherePoint(q.location) : SpherePoint::pole(dim);
    std::vector<double> c(static_cast<std::size_t>(L) + 1);
    for (int l = 0; l <= L; ++l) c[l] = e.coefficient(j, l);
    e.pieces.push_back({std::move(pole), std::move(c)});
  }
  return e;
}

namespace {

// sum over pieces of sum_l coeffs[l] * factor[l] * P_l(pole . zeta)
double zonal_eval(const FieldExpansion& e, std::span<const double> zeta, const std::vector<double>& factor,
                  std::vector<double>& scratch) {
  const int L = e.truncation;
  scratch.resize(static_cast<std::size_t>(L) + 1);
  double s = 0.0;
  for (const auto& piece : e.pieces) {
    const double t = std::clamp(dot(piece.pole.coords(), zeta), -1.0, 1.0);
    legendre_fill(e.dim, L, t, scratch.data());
    double ps = 0.0;
    for (int l = L; l >= 0; --l) ps += piece.coeffs[l] * factor[l] * scratch[l];
    s += ps;
  }
  return s;
}

std::vector<double> reconstruction_factors(const FieldExpansion& e, bool apply_d) {
  const int d = e.dim.value();
  const double omega = surface_area(e.dim);
  std::vector<double> fac(static_cast<std::size_t>(e.truncation) + 1);
  for (int l = 0; l <= e.truncation; ++l) {
    fac[l] = harmonic_dim_value(e.dim, l) / omega;
    if (apply_d) fac[l] *= (2.0 * l + d - 1) / ((d - 1) * omega);
  }
  return fac;
}

std::vector<double> eval_on(const FieldExpansion& e, const QuadratureMeasure& quad, bool apply_d) {
  if (quad.dim() != e.dim) throw std::invalid_argument("expansion and quadrature dimensions differ");
  const std::vector<double> fac = reconstruction_factors(e, apply_d);
  std::vector<double> out(quad.size());
  parallel_for(quad.size(), [&](std::size_t i) {
    std::vector<double> scratch;
    out[i] = zonal_eval(e, quad.points()[i].coords(), fac, scratch);
  }, 64);
  return out;
}

}  // namespace

double evaluate_expansion(const FieldExpansion& e, const SpherePoint& zeta) {
  std::vector<double> scratch;
  return zonal_eval(e, zeta.coords(), reconstruction_factors(e, false), scratch);
}

double apply_D(const FieldExpansion& e, const SpherePoint& zeta) {
  std::vector<double> scratch;
  return zonal_eval(e, zeta.coords(), reconstruction_factors(e, true), scratch);
}

std::vector<double> evaluate_expansion_on(const FieldExpansion& e, const QuadratureMeasure& quad) {
  return eval_on(e, quad, false);
}

std::vector<double> apply_D_on(const FieldExpansion& e, const QuadratureMeasure& quad) { return eval_on(e, quad, true); }

// ---------------------------------------------------------------------------

FunkHeckeResult funk_hecke(const std::function<double(double)>& kernel, int l, SphereDim dim, int nodes) {
  if (l < 0) throw std::invalid_argument("funk_hecke: negative degree");
  const int n = nodes > 0 ? nodes : 2 * l + 20;
  const int d = dim.value();
  const GaussRule rule = gauss_gegenbauer(n, 0.5 * (d - 2));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = rule.nodes[i];
    const double k = kernel(t);
    if (!std::isfinite(k)) throw std::domain_error("funk_hecke: kernel is not finite at t = " + std::to_string(t));
    s += rule.weights[i] * k * legendre(dim, l, t);
  }
  return {sphere_area(d - 1) / sphere_area(d) * s, n};
}

SobolevParams::SobolevParams(double s, SphereDim dim) : s_(s), dim_(dim) {
  if (!(s > 0.5 * dim.value())) {
    throw std::invalid_argument("Sobolev smoothness must satisfy s > d/2 (s = " + std::to_string(s) + ")");
  }
}

double SobolevParams::weight(int l) const {
  if (l == 0) return 1.0;
  const int d = dim_.value();
  return std::pow(l, s_) * (2.0 * l + d - 1) / ((d - 1) * surface_area(dim_));
}

double sobolev_norm(const FieldExpansion& e, const SobolevParams& sp) {
  if (sp.dim() != e.dim) throw std::invalid_argument("sobolev_norm: dimension mismatch");
  const SphereDim dim = e.dim;
  const double omega = surface_area(dim);
  const std::size_t n = e.pieces.size();
  if (n == 0) return 0.0;

  // m_l c_{j,l}: amplitude * omega at l = 0, amplitude * q^l * l^s beyond.
  auto weighted = [&](std::size_t j, int l) {
    if (l == 0) return e.amplitudes[j] * omega;
    return e.amplitudes[j] * std::pow(e.ratios[j], l) * std::pow(l, sp.s());
  };
  auto bound_term = [&](int l) {
    double a = 0.0;
    for (std::size_t j = 0; j < n; ++j) a += std::abs(weighted(j, l));
    return a * a * harmonic_dim_value(dim, l) / omega;
  };

  struct PairState {
    std::size_t i, j;
    double t, prev, cur;
  };
  std::vector<PairState> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double t = std::clamp(dot(e.pieces[i].pole.coords(), e.pieces[j].pole.coords()), -1.0, 1.0);
      pairs.push_back({i, j, t, 0.0, 1.0});
    }
  }
  const int d = dim.value();
  double sum = 0.0;
  for (int l = 0;; ++l) {
    double level = 0.0;
    for (auto& p : pairs) {
      double P;
      if (l == 0) {
        P = 1.0;
      } else if (l == 1) {
        p.prev = 1.0;
        p.cur = p.t;
        P = p.t;
      } else {
        const int m = l - 1;
        const double next = ((2.0 * m + d - 1) * p.t * p.cur - m * p.prev) / (m + d - 1.0);
        p.prev = p.cur;
        p.cur = next;
        P = next;
      }
      const double w = weighted(p.i, l) * weighted(p.j, l) * P;
      level += (p.i == p.j) ? w : 2.0 * w;
    }
    sum += level * harmonic_dim_value(dim, l) / omega;
    if (l >= 2) {
      const double tail = tail_after(bound_term, l);
      if (tail <= 1e-17 * std::abs(sum) || tail == 0.0) break;
    }
    if (l > 100000) throw DivergenceError("sobolev_norm: series did not converge");
  }
  return std::sqrt(std::max(0.0, sum));
}

namespace {

struct SeriesResult {
  double partial = 0.0;
  double tail = 0.0;
  long terms = 0;
};

// sum_{l >= 1} term(l), doubling the cutoff until tail(N) < rel * partial.
template <class Term, class Tail>
SeriesResult sum_with_tail(Term&& term, Tail&& tail, double rel = 1e-12, long max_terms = 1L << 25) {
  SeriesResult res;
  long N = 1024;
  long l = 1;
  for (;;) {
    for (; l <= N; ++l) res.partial += term(static_cast<double>(l));
    res.terms = N;
    res.tail = tail(static_cast<double>(N));
    if (res.tail < rel * res.partial || N >= max_terms) return res;
    N *= 2;
  }
}

}  // namespace

EmbeddingConstants embedding_constants(const SobolevParams& sp) {
  const double d = sp.dim().value();
  const double s = sp.s();
  const double omega = surface_area(sp.dim());
  const double ed = std::exp(d);

  const double k1 = ed * omega * (d - 1) * (d - 1);
  const SeriesResult a = sum_with_tail(
      [&](double l) { return k1 * std::pow(l, d - 1 - 2 * s) / ((2 * l + d - 1) * (2 * l + d - 1)); },
      [&](double N) { return 0.25 * k1 * std::pow(N, d - 2 - 2 * s) / (2 * s + 2 - d); });
  const double k2 = ed / omega;
  const SeriesResult b = sum_with_tail([&](double l) { return k2 * std::pow(l, d - 1 - 2 * s); },
                                       [&](double N) { return k2 * std::pow(N, d - 2 * s) / (2 * s - d); });

  EmbeddingConstants c;
  c.s = s;
  c.d = static_cast<int>(d);
  c.c_star = std::sqrt(a.partial + a.tail + 1.0 / omega);
  c.c_star_star = omega * std::sqrt(b.partial + b.tail + 1.0 / (omega * omega * omega));
  c.tail_star = a.tail / a.partial;
  c.tail_star_star = b.tail / b.partial;
  c.terms = std::max(a.terms, b.terms);
  return c;
}

double lipschitz_constant(const SobolevParams& sp) {
  const SphereDim dim = sp.dim();
  const double d = dim.value();
  const double s = sp.s();
  if (!(s > (3.0 * d - 2.0) / 4.0)) {
    throw std::invalid_argument("Lipschitz bound requires s > (3d - 2)/4");
  }
  const double omega = surface_area(dim);
  const SeriesResult r = sum_with_tail(
      [&](double l) {
        const int li = static_cast<int>(l);
        const double m = sp.weight(li);
        return harmonic_dim_value(dim, li) * legendre_derivative_at_one(dim, li) / (omega * m * m);
      },
      [&](double N) { return 0.25 * (d - 1) * (d - 1) * omega * std::exp(d) * std::pow(N, d - 2 * s) / (2 * s - d); });
  return std::sqrt(r.partial + r.tail);
}

LipschitzReport lipschitz_check(const FieldExpansion& e, const SobolevParams& sp,
                                std::span<const std::pair<SpherePoint, SpherePoint>> pairs) {
  LipschitzReport rep;
  rep.constant = lipschitz_constant(sp);
  rep.hs_norm = sobolev_norm(e, sp);
  rep.bound = rep.constant * rep.hs_norm;
  for (const auto& [zeta, eta] : pairs) {
    const double dist = euclidean_distance(zeta, eta);
    if (dist == 0.0) continue;
    const double diff = std::abs(evaluate_expansion(e, eta) - evaluate_expansion(e, zeta));
    rep.max_ratio = std::max(rep.max_ratio, diff / dist);
    ++rep.pairs;
  }
  return rep;
}

}  // namespace sphkh
