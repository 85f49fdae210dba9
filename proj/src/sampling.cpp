#include "sphkh/sampling.hpp"

#include <cmath>

namespace sphkh {

SpherePoint random_point(SphereDim dim, Rng& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    std::vector<double> x(dim.ambient());
    for (auto& v : x) v = g(rng);
    if (norm(x) > 1e-8) return SpherePoint(std::move(x));
  }
}

Scattering random_scattering(SphereDim dim, std::size_t n, Rng& rng) {
  std::vector<SpherePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(dim, rng));
  return {dim, std::move(pts), "random"};
}

DiscreteSignedMeasure random_atoms(SphereDim dim, std::size_t n, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<SpherePoint> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(random_point(dim, rng));
    w.push_back(u(rng));
  }
  return {dim, std::move(pts), std::move(w), "random atoms"};
}

HarmonicField random_field(SphereDim dim, std::size_t k, double rho_max, Rng& rng) {
  std::uniform_real_distribution<double> radius(0.0, rho_max), strength(-1.0, 1.0);
  std::vector<PointCharge> charges;
  for (std::size_t j = 0; j < k; ++j) {
    const SpherePoint u = random_point(dim, rng);
    const double rho = radius(rng);
    PointCharge q;
    for (double c : u.coords()) q.location.push_back(rho * c);
    q.strength = strength(rng);
    charges.push_back(std::move(q));
  }
  return {dim, std::move(charges)};
}

}  // namespace sphkh
