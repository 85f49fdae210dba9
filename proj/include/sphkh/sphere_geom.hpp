#pragma once

// Points, scatterings and partitions of S^d. All distances are chordal
// (ambient Euclidean), never geodesic.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphkh/specfun.hpp"

namespace sphkh {

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Unit vector in R^{d+1}. Construction renormalizes unless the input is
/// already unit to within 1e-14, so re-reading a written point is bit-exact.
class SpherePoint {
 public:
  explicit SpherePoint(std::vector<double> coords);
  /// Rejects inputs whose norm differs from one by more than tol.
  static SpherePoint from_unit(std::vector<double> coords, double tol);
  /// North pole (1, 0, ..., 0) of S^d.
  static SpherePoint pole(SphereDim dim);

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t ambient_dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  SpherePoint operator-() const;

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  struct Trusted {};
  SpherePoint(std::vector<double> coords, Trusted) : coords_(std::move(coords)) {}
  std::vector<double> coords_;
};

/// sqrt(2 - 2 a.b), clamped to [0, 2].
double euclidean_distance(const SpherePoint& a, const SpherePoint& b);

/// Ordered set of pairwise distinct points (minimum separation > 1e-9).
class Scattering {
 public:
  Scattering(SphereDim dim, std::vector<SpherePoint> points, std::string label = {});

  SphereDim dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<SpherePoint>& points() const noexcept { return points_; }
  const SpherePoint& operator[](std::size_t i) const { return points_[i]; }
  const std::string& label() const noexcept { return label_; }

 private:
  SphereDim dim_;
  std::vector<SpherePoint> points_;
  std::string label_;
};

class ZonalGrid;

/// One region of a partition. Areas are under mu_d (they sum to omega_d).
struct Region {
  double area = 0.0;
  double diameter = 0.0;
  /// Largest distance from `center` to a point of the region.
  double circumradius = 0.0;
  SpherePoint center;
  std::optional<SpherePoint> representative;
};

/// Disjoint partition of S^d built from the recursive zonal equal-area
/// scheme: polar caps plus collars, each collar split by a partition of the
/// cross-section S^{d-1}. Points on shared boundaries belong to the region
/// with the smaller index.
class SpherePartition {
 public:
  SphereDim dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return regions_.size(); }
  const std::vector<Region>& regions() const noexcept { return regions_; }
  const Region& region(std::size_t i) const { return regions_.at(i); }

  /// Index of the region containing x.
  std::size_t locate(const SpherePoint& x) const;
  /// Membership test for one region, evaluated independently of locate().
  bool contains(std::size_t region, const SpherePoint& x) const;

  /// Number of zones (caps and collars) along the polar axis.
  std::size_t zone_count() const;

  SpherePartition with_representatives(std::vector<SpherePoint> reps) const;

  friend SpherePartition equal_area_partition(SphereDim dim, std::size_t n);

 private:
  SpherePartition(SphereDim dim, std::shared_ptr<const ZonalGrid> grid, std::vector<Region> regions);

  SphereDim dim_;
  std::shared_ptr<const ZonalGrid> grid_;
  std::vector<Region> regions_;
};

/// n regions of area omega_d / n each, with centers as representatives.
SpherePartition equal_area_partition(SphereDim dim, std::size_t n);

/// max over regions of the region diameter.
double partition_norm(const SpherePartition& partition);

/// Mesh norm as an interval: value is the largest distance from a sample
/// point (the centers of an equal-area partition with `resolution` cells) to
/// the scattering, and the true mesh norm lies within value +- resolution_error.
struct MeshNormEstimate {
  double value = 0.0;
  double resolution_error = 0.0;

  double lower() const { return value - resolution_error; }
  double upper() const { return std::min(2.0, value + resolution_error); }
};

MeshNormEstimate mesh_norm(const Scattering& points, SphereDim dim, std::size_t resolution);
/// Uses the default resolution of 16 cells per point.
MeshNormEstimate mesh_norm(const Scattering& points);

/// Replaces each region's representative with the unique scattering point it
/// contains. Throws MatchingError naming the first region holding zero or
/// several points.
SpherePartition match_partition_to_scattering(const SpherePartition& partition, const Scattering& points);

/// Subset E of E_o together with a partition in which every region holds
/// exactly one point of E and at least one point of E_o.
struct Reduction {
  Scattering reduced;
  SpherePartition partition;
  /// Index into E_o of each kept point, in region order.
  std::vector<std::size_t> kept;
  MeshNormEstimate original_mesh;
  MeshNormEstimate reduced_mesh;
  double partition_norm = 0.0;
  /// partition_norm / original_mesh.value, an upper estimate of |R| / delta_{E_o}.
  double constant = 0.0;
};

Reduction reduce_scattering(const Scattering& original, SphereDim dim);

/// 8 d sqrt(2 d (d + 1)): the reference constant relating partition norm and mesh norm.
double reference_reduction_constant(SphereDim dim);

}  // namespace sphkh
