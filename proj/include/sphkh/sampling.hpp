#pragma once

// Seeded random inputs: points, atomic measures, scatterings, charge fields.

#include <cstdint>
#include <random>

#include "sphkh/harmonic.hpp"
#include "sphkh/measures.hpp"
#include "sphkh/sphere_geom.hpp"

namespace sphkh {

using Rng = std::mt19937_64;

/// Uniform on S^d (normalized Gaussian vector).
SpherePoint random_point(SphereDim dim, Rng& rng);

Scattering random_scattering(SphereDim dim, std::size_t n, Rng& rng);

/// n uniform atoms with weights uniform in [lo, hi].
DiscreteSignedMeasure random_atoms(SphereDim dim, std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0);

/// k charges at uniform directions and radii uniform in [0, rho_max], strengths uniform in [-1, 1].
HarmonicField random_field(SphereDim dim, std::size_t k, double rho_max, Rng& rng);

}  // namespace sphkh
