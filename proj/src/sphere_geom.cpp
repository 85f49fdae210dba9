#include "sphkh/sphere_geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "sphkh/error.hpp"
#include "sphkh/parallel.hpp"

namespace sphkh {

namespace {
constexpr double kPi = std::numbers::pi;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 3) throw std::invalid_argument("SpherePoint: need at least 3 coordinates (d >= 2)");
  const double n = norm(coords_);
  if (!std::isfinite(n) || n == 0.0) throw std::invalid_argument("SpherePoint: zero or non-finite vector");
  if (std::abs(n - 1.0) > 1e-14) {
    for (double& c : coords_) c /= n;
  }
}

SpherePoint SpherePoint::from_unit(std::vector<double> coords, double tol) {
  const double n = norm(coords);
  if (!std::isfinite(n) || std::abs(n - 1.0) > tol) {
    throw std::invalid_argument("point is not on the unit sphere (norm " + std::to_string(n) + ")");
  }
  return SpherePoint(std::move(coords));
}

SpherePoint SpherePoint::pole(SphereDim dim) {
  std::vector<double> c(static_cast<std::size_t>(dim.ambient()), 0.0);
  c[0] = 1.0;
  return SpherePoint(std::move(c), Trusted{});
}

SpherePoint SpherePoint::operator-() const {
  std::vector<double> c(coords_);
  for (double& v : c) v = -v;
  return SpherePoint(std::move(c), Trusted{});
}

double euclidean_distance(const SpherePoint& a, const SpherePoint& b) {
  const double t = dot(a.coords(), b.coords());
  return std::sqrt(std::clamp(2.0 - 2.0 * t, 0.0, 4.0));
}

Scattering::Scattering(SphereDim dim, std::vector<SpherePoint> points, std::string label)
    : dim_(dim), points_(std::move(points)), label_(std::move(label)) {
  const auto amb = static_cast<std::size_t>(dim.ambient());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].ambient_dim() != amb) {
      throw std::invalid_argument("Scattering: point " + std::to_string(i) + " has wrong dimension");
    }
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < amb; ++k) {
        const double diff = points_[i][k] - points_[j][k];
        s += diff * diff;
      }
      if (s <= 1e-18) {
        throw std::invalid_argument("Scattering: points " + std::to_string(i) + " and " + std::to_string(j) +
                                    " are not distinct");
      }
    }
  }
}

double reference_reduction_constant(SphereDim dim) {
  const double d = dim.value();
  return 8.0 * d * std::sqrt(2.0 * d * (d + 1.0));
}

// ---------------------------------------------------------------------------
// Zonal grid
// ---------------------------------------------------------------------------

namespace {

// int_0^theta sin^k(t) dt
double sin_power_integral(int k, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double h = std::sin(0.5 * theta);
  double even = theta;      // I_0
  double odd = 2.0 * h * h; // I_1
  if (k == 0) return even;
  if (k == 1) return odd;
  double result = 0.0;
  for (int j = 2; j <= k; ++j) {
    double& slot = (j % 2 == 0) ? even : odd;
    slot = (-std::pow(s, j - 1) * c + (j - 1) * slot) / j;
    result = slot;
  }
  return result;
}

// mu_d-area of the polar cap of colatitude theta on S^d.
double cap_area(int d, double theta) {
  if (d == 2) {
    const double h = std::sin(0.5 * theta);
    return 4.0 * kPi * h * h;
  }
  return sphere_area(d - 1) * sin_power_integral(d - 1, theta);
}

double cap_colatitude(int d, double area) {
  const double total = sphere_area(d);
  if (area <= 0.0) return 0.0;
  if (area >= total) return kPi;
  if (d == 2) return 2.0 * std::asin(std::sqrt(area / (4.0 * kPi)));
  double lo = 0.0, hi = kPi;
  double theta = kPi * area / total;
  const double lower_area = sphere_area(d - 1);
  for (int it = 0; it < 200; ++it) {
    const double f = cap_area(d, theta) - area;
    if (f > 0) hi = theta; else lo = theta;
    const double fp = lower_area * std::pow(std::sin(theta), d - 1);
    double next = fp > 0 ? theta - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) < 1e-16 || hi - lo < 1e-16) {
      theta = next;
      break;
    }
    theta = next;
  }
  return theta;
}

// min over a in [lo, hi] of A cos a + B sin a.
double min_harmonic(double A, double B, double lo, double hi) {
  double m = std::min(A * std::cos(lo) + B * std::sin(lo), A * std::cos(hi) + B * std::sin(hi));
  const double R = std::hypot(A, B);
  if (R > 0.0) {
    double a = std::atan2(B, A) + kPi;  // argmin on the circle
    while (a < lo) a += 2.0 * kPi;
    while (a > lo + 2.0 * kPi) a -= 2.0 * kPi;
    if (a <= hi) m = std::min(m, -R);
  }
  return m;
}

double chord_from_cos(double c) { return std::sqrt(std::clamp(2.0 - 2.0 * c, 0.0, 4.0)); }

struct CellGeometry {
  double area;
  double diameter;
  double circumradius;
  std::vector<double> center;
};

}  // namespace

class ZonalGrid {
 public:
  ZonalGrid(int d, std::size_t n) : d_(d), n_(n) {
    if (n == 0) throw std::invalid_argument("equal_area_partition: need at least one region");
    if (d == 1) return;
    std::vector<std::size_t> counts;
    if (n == 1) {
      bounds_ = {0.0, kPi};
      counts = {1};
    } else {
      const double area = sphere_area(d) / static_cast<double>(n);
      const double polar = cap_colatitude(d, area);
      if (n == 2) {
        bounds_ = {0.0, polar, kPi};
        counts = {1, 1};
      } else {
        const double ideal_angle = std::pow(area, 1.0 / d);
        const int collars = std::max(1, static_cast<int>(std::lround((kPi - 2.0 * polar) / ideal_angle)));
        const double fit = (kPi - 2.0 * polar) / collars;
        counts.push_back(1);
        double carry = 0.0;
        long assigned = 0;
        for (int k = 1; k <= collars; ++k) {
          const double ideal =
              (cap_area(d, polar + k * fit) - cap_area(d, polar + (k - 1) * fit)) / area;
          long m = std::lround(ideal + carry);
          carry += ideal - static_cast<double>(m);
          if (k == collars) m = static_cast<long>(n) - 2 - assigned;
          if (m < 1) throw std::logic_error("equal_area_partition: empty collar");
          assigned += m;
          counts.push_back(static_cast<std::size_t>(m));
        }
        counts.push_back(1);
        bounds_.push_back(0.0);
        std::size_t cumulative = 0;
        for (std::size_t j = 0; j + 1 < counts.size(); ++j) {
          cumulative += counts[j];
          bounds_.push_back(cap_colatitude(d, static_cast<double>(cumulative) * area));
        }
        bounds_.push_back(kPi);
      }
    }
    std::size_t off = 0;
    for (std::size_t m : counts) {
      offsets_.push_back(off);
      sub_.emplace_back(d - 1, m);
      off += m;
    }
    offsets_.push_back(off);
  }

  int dim() const { return d_; }
  std::size_t size() const { return n_; }
  std::size_t zones() const { return d_ == 1 ? 1 : sub_.size(); }

  std::size_t locate(std::span<const double> x) const {
    if (d_ == 1) {
      if (n_ == 1) return 0;
      const double phi = azimuth(x);
      const double pos = std::ceil(phi * static_cast<double>(n_) / (2.0 * kPi)) - 1.0;
      return static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n_ - 1)));
    }
    const double theta = colatitude(x);
    auto it = std::lower_bound(bounds_.begin() + 1, bounds_.end(), theta);
    std::size_t zone = static_cast<std::size_t>(it - (bounds_.begin() + 1));
    zone = std::min(zone, sub_.size() - 1);
    if (sub_[zone].size() == 1) return offsets_[zone];
    const std::vector<double> y = cross_section(x);
    return offsets_[zone] + sub_[zone].locate(y);
  }

  bool contains(std::size_t cell, std::span<const double> x) const {
    if (d_ == 1) {
      if (n_ == 1) return true;
      const double phi = azimuth(x);
      const double w = 2.0 * kPi / static_cast<double>(n_);
      const double lo = w * static_cast<double>(cell), hi = w * static_cast<double>(cell + 1);
      return (phi > lo || (cell == 0 && phi >= lo)) && phi <= hi;
    }
    const std::size_t zone = zone_of(cell);
    const double theta = colatitude(x);
    const bool in_band = (theta > bounds_[zone] || (zone == 0 && theta >= 0.0)) && theta <= bounds_[zone + 1];
    if (!in_band) return false;
    if (sub_[zone].size() == 1) return true;
    return sub_[zone].contains(cell - offsets_[zone], cross_section(x));
  }

  CellGeometry geometry(std::size_t cell) const {
    if (d_ == 1) {
      const double w = 2.0 * kPi / static_cast<double>(n_);
      const double mid = w * (static_cast<double>(cell) + 0.5);
      return {w, 2.0 * std::sin(0.5 * std::min(w, kPi)), 2.0 * std::sin(0.25 * w), {std::cos(mid), std::sin(mid)}};
    }
    const std::size_t zone = zone_of(cell);
    const ZonalGrid& sub = sub_[zone];
    const CellGeometry inner = sub.geometry(cell - offsets_[zone]);
    const double lo = bounds_[zone], hi = bounds_[zone + 1];

    CellGeometry g;
    g.area = (cap_area(d_, hi) - cap_area(d_, lo)) * inner.area / sphere_area(d_ - 1);

    // |x - x'|^2 = 2 - 2 (cos a cos b + c sin a sin b), c = min over the
    // cross-section cell of y.y' = 1 - diam^2 / 2.
    const double c = 1.0 - 0.5 * inner.diameter * inner.diameter;
    double fmin = std::min({std::cos(2.0 * lo) * 0.5 * (1 - c) + 0.5 * (1 + c),
                            std::cos(lo) * std::cos(hi) + c * std::sin(lo) * std::sin(hi),
                            std::cos(2.0 * hi) * 0.5 * (1 - c) + 0.5 * (1 + c)});
    if (lo <= 0.5 * kPi && 0.5 * kPi <= hi) fmin = std::min(fmin, c);
    for (double a : {lo, hi}) fmin = std::min(fmin, min_harmonic(std::cos(a), c * std::sin(a), lo, hi));
    g.diameter = chord_from_cos(fmin);

    double theta_c;
    if (sub.size() == 1 && lo == 0.0) theta_c = 0.0;
    else if (sub.size() == 1 && hi == kPi) theta_c = kPi;
    else theta_c = 0.5 * (lo + hi);
    const double c_center = 1.0 - 0.5 * inner.circumradius * inner.circumradius;
    const double gmin = min_harmonic(std::cos(theta_c), c_center * std::sin(theta_c), lo, hi);
    g.circumradius = chord_from_cos(gmin);

    g.center.resize(static_cast<std::size_t>(d_) + 1);
    g.center[0] = std::cos(theta_c);
    const double s = std::sin(theta_c);
    for (std::size_t i = 0; i < inner.center.size(); ++i) g.center[i + 1] = s * inner.center[i];
    return g;
  }

 private:
  std::size_t zone_of(std::size_t cell) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), cell);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
  }

  static double azimuth(std::span<const double> x) {
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += 2.0 * kPi;
    return phi;
  }

  static double colatitude(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
    return std::atan2(std::sqrt(s), x[0]);
  }

  static std::vector<double> cross_section(std::span<const double> x) {
    std::vector<double> y(x.begin() + 1, x.end());
    const double n = norm(y);
    if (n == 0.0) {
      std::fill(y.begin(), y.end(), 0.0);
      y[0] = 1.0;
    } else {
      for (double& v : y) v /= n;
    }
    return y;
  }

  int d_;
  std::size_t n_;
  std::vector<double> bounds_;
  std::vector<std::size_t> offsets_;
  std::vector<ZonalGrid> sub_;
};

// ---------------------------------------------------------------------------
// SpherePartition
// ---------------------------------------------------------------------------

SpherePartition::SpherePartition(SphereDim dim, std::shared_ptr<const ZonalGrid> grid, std::vector<Region> regions)
    : dim_(dim), grid_(std::move(grid)), regions_(std::move(regions)) {}

std::size_t SpherePartition::locate(const SpherePoint& x) const { return grid_->locate(x.coords()); }

bool SpherePartition::contains(std::size_t region, const SpherePoint& x) const {
  return grid_->contains(region, x.coords());
}

std::size_t SpherePartition::zone_count() const { return grid_->zones(); }

SpherePartition SpherePartition::with_representatives(std::vector<SpherePoint> reps) const {
  if (reps.size() != regions_.size()) throw std::invalid_argument("with_representatives: size mismatch");
  SpherePartition out = *this;
  for (std::size_t i = 0; i < reps.size(); ++i) out.regions_[i].representative = std::move(reps[i]);
  return out;
}

SpherePartition equal_area_partition(SphereDim dim, std::size_t n) {
  auto grid = std::make_shared<const ZonalGrid>(dim.value(), n);
  std::vector<Region> regions;
  regions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellGeometry g = grid->geometry(i);
    SpherePoint center(std::move(g.center));
    regions.push_back(Region{g.area, g.diameter, g.circumradius, center, center});
  }
  return SpherePartition(dim, std::move(grid), std::move(regions));
}

double partition_norm(const SpherePartition& partition) {
  double m = 0.0;
  for (const Region& r : partition.regions()) m = std::max(m, r.diameter);
  return m;
}

// ---------------------------------------------------------------------------
// Mesh norm
// ---------------------------------------------------------------------------

namespace {

std::vector<double> flatten(const std::vector<SpherePoint>& pts, std::size_t amb) {
  std::vector<double> flat(pts.size() * amb);
  for (std::size_t i = 0; i < pts.size(); ++i) std::copy(pts[i].coords().begin(), pts[i].coords().end(), flat.begin() + i * amb);
  return flat;
}

}  // namespace

MeshNormEstimate mesh_norm(const Scattering& points, SphereDim dim, std::size_t resolution) {
  if (points.empty()) throw std::invalid_argument("mesh_norm: empty scattering");
  if (resolution < 1) throw std::invalid_argument("mesh_norm: resolution must be >= 1");
  if (points.dim() != dim) throw std::invalid_argument("mesh_norm: dimension mismatch");
  const SpherePartition sample = equal_area_partition(dim, resolution);
  const std::size_t amb = static_cast<std::size_t>(dim.ambient());
  const std::vector<double> flat = flatten(points.points(), amb);
  const std::size_t n = points.size();

  std::vector<double> nearest(sample.size());
  parallel_for(sample.size(), [&](std::size_t s) {
    const auto c = sample.region(s).center.coords();
    double best = -2.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = flat.data() + i * amb;
      double t = 0.0;
      for (std::size_t k = 0; k < amb; ++k) t += c[k] * p[k];
      best = std::max(best, t);
    }
    nearest[s] = std::sqrt(std::clamp(2.0 - 2.0 * best, 0.0, 4.0));
  }, 16);

  MeshNormEstimate est;
  est.value = *std::max_element(nearest.begin(), nearest.end());
  est.resolution_error = partition_norm(sample);
  return est;
}

MeshNormEstimate mesh_norm(const Scattering& points) {
  return mesh_norm(points, points.dim(), 16 * std::max<std::size_t>(1, points.size()));
}

// ---------------------------------------------------------------------------
// Matching and reduction
// ---------------------------------------------------------------------------

SpherePartition match_partition_to_scattering(const SpherePartition& partition, const Scattering& points) {
  if (points.size() != partition.size()) {
    throw MatchingError("matching requires as many points (" + std::to_string(points.size()) +
                            ") as regions (" + std::to_string(partition.size()) + ")",
                        0);
  }
  std::vector<std::size_t> count(partition.size(), 0), owner(partition.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t r = partition.locate(points[i]);
    ++count[r];
    owner[r] = i;
  }
  std::vector<SpherePoint> reps;
  reps.reserve(partition.size());
  for (std::size_t r = 0; r < partition.size(); ++r) {
    if (count[r] != 1) {
      throw MatchingError("region " + std::to_string(r) + " contains " + std::to_string(count[r]) +
                              " scattering points, expected exactly one",
                          r);
    }
    reps.push_back(points[owner[r]]);
  }
  return partition.with_representatives(std::move(reps));
}

Reduction reduce_scattering(const Scattering& original, SphereDim dim) {
  if (original.empty()) throw std::invalid_argument("reduce_scattering: empty scattering");
  if (original.dim() != dim) throw std::invalid_argument("reduce_scattering: dimension mismatch");
  const std::size_t n = original.size();
  const std::size_t resolution = 16 * n;

  // Equal-area partition in which every cell holds at least one original
  // point. Coarse steps down from n cells until every cell is hit, then the
  // counts between that and the last miss are tried from the top. Occupancy
  // is not monotone in the cell count, so this need not be the global maximum.
  std::vector<std::size_t> cell_of(n);
  auto all_filled = [&](std::size_t m) {
    const SpherePartition trial = equal_area_partition(dim, m);
    std::vector<char> hit(m, 0);
    std::size_t filled = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cell_of[i] = trial.locate(original[i]);
      if (!hit[cell_of[i]]) {
        hit[cell_of[i]] = 1;
        ++filled;
      }
    }
    return filled == m;
  };
  std::size_t m = n, failed = n + 1;
  while (!all_filled(m)) {
    failed = m;
    m -= std::max<std::size_t>(1, m / 50);
  }
  for (std::size_t k = failed - 1; k > m; --k) {
    if (all_filled(k)) {
      m = k;
      break;
    }
  }
  all_filled(m);

  SpherePartition grid = equal_area_partition(dim, m);
  std::vector<std::size_t> kept(m, n);
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cell_of[i];
    const double dist = euclidean_distance(original[i], grid.region(c).center);
    if (dist < best[c]) {
      best[c] = dist;
      kept[c] = i;
    }
  }
  std::vector<SpherePoint> reduced_points;
  reduced_points.reserve(m);
  for (std::size_t c = 0; c < m; ++c) reduced_points.push_back(original[kept[c]]);

  Scattering reduced(dim, reduced_points, original.label().empty() ? "reduced" : original.label() + " (reduced)");
  SpherePartition partition = grid.with_representatives(std::move(reduced_points));
  const MeshNormEstimate mo = mesh_norm(original, dim, resolution);
  const MeshNormEstimate mr = mesh_norm(reduced, dim, resolution);
  const double pn = partition_norm(partition);
  return Reduction{std::move(reduced), std::move(partition), std::move(kept), mo, mr, pn, pn / mo.value};
}

}  // namespace sphkh
