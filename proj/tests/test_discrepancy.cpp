#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "sphkh/discrepancy.hpp"
#include "sphkh/error.hpp"
#include "sphkh/sampling.hpp"

using namespace sphkh;

namespace {

SpherePoint pt(std::vector<double> v) { return SpherePoint(std::move(v)); }

QuadratureMeasure sigma_d(SphereDim dim, int degree) {
  return QuadratureMeasure::product_rule(dim, degree).scaled(1.0 / surface_area(dim));
}

Scattering centers(SphereDim dim, std::size_t n) {
  std::vector<SpherePoint> c;
  const SpherePartition p = equal_area_partition(dim, n);
  for (const auto& r : p.regions()) c.push_back(r.center);
  return {dim, c};
}

}  // namespace

TEST_CASE("identity for a central charge and a point mass") {
  const SphereDim d2(2);
  const ShellConfig cfg(0.3, 0.7);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 60);
  const HarmonicField f = make_field(d2, {{{0, 0, 0}, 2.5}});
  const DiscreteSignedMeasure delta(d2, {pt({0.6, 0, 0.8})}, {1.0});
  const IdentityReport rep = kh_identity(f, delta, cfg, quad);
  CHECK(rep.lhs == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(rep.relative < 1e-10);
  CHECK(rep.residual == std::abs(rep.lhs - rep.rhs));

  const DiscreteSignedMeasure zero_mass(d2, {pt({1, 0, 0}), pt({0, 1, 0})}, {0.4, -0.4});
  const IdentityReport z = kh_identity(f, zero_mass, cfg, quad);
  CHECK(std::abs(z.lhs) < 1e-15);
  CHECK(std::abs(z.rhs) < 1e-10);

  const HarmonicField outside = make_field(d2, {{{0.5, 0, 0}, 1.0}});
  CHECK_THROWS_AS(kh_identity(outside, delta, cfg, quad), std::invalid_argument);
  const HarmonicField beyond = make_field(d2, {{{0.8, 0, 0}, 1.0}});
  CHECK_THROWS_AS(kh_identity(beyond, delta, cfg, quad), DivergenceError);
}

TEST_CASE("identity on random inputs in several dimensions") {
  Rng rng(100);
  for (int d : {2, 3, 4}) {
    const SphereDim dim(d);
    const ShellConfig cfg(0.3, 0.7);
    const QuadratureMeasure quad = QuadratureMeasure::product_rule(dim, d == 2 ? 120 : (d == 3 ? 80 : 40));
    for (int trial = 0; trial < 3; ++trial) {
      const HarmonicField f = random_field(dim, 3, 0.24, rng);
      const DiscreteSignedMeasure sigma = random_atoms(dim, 20, rng);
      const IdentityReport rep = kh_identity(f, sigma, cfg, quad);
      CHECK(rep.relative < (d == 4 ? 1e-6 : 1e-9));
    }
  }
}

TEST_CASE("identity is stable under quadrature refinement") {
  Rng rng(5);
  const SphereDim d2(2);
  const ShellConfig cfg(0.3, 0.7);
  const HarmonicField f = random_field(d2, 3, 0.24, rng);
  const DiscreteSignedMeasure sigma = random_atoms(d2, 30, rng);
  const IdentityReport a = kh_identity(f, sigma, cfg, QuadratureMeasure::product_rule(d2, 100));
  const IdentityReport b = kh_identity(f, sigma, cfg, QuadratureMeasure::product_rule(d2, 200));
  CHECK(std::abs(a.rhs - b.rhs) <= 1e-9 * std::abs(b.rhs));
}

TEST_CASE("Hoelder bounds dominate the identity") {
  Rng rng(7);
  const SphereDim d2(2);
  const ShellConfig cfg(0.3, 0.7);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 80);
  for (int trial = 0; trial < 15; ++trial) {
    const HarmonicField f = random_field(d2, 1 + rng() % 4, 0.24, rng);
    const DiscreteSignedMeasure sigma = random_atoms(d2, 5 + rng() % 40, rng);
    const IdentityReport id = kh_identity(f, sigma, cfg, quad);
    for (double p : {1.0, 1.5, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
      const BoundReport b = theorem2_bound(f, sigma, cfg, quad, p);
      CHECK(b.slack >= -1e-9);
      CHECK(b.slack_sharp >= -1e-9);
      CHECK(b.rhs >= std::abs(id.rhs) - 1e-9);
      CHECK(1.0 / b.p + 1.0 / b.p_conjugate == doctest::Approx(1.0));
      CHECK(b.rhs_sharp * cfg.r == doctest::Approx(b.rhs * cfg.r0));
    }
    // With p = 2 the 1/r form is Cauchy-Schwarz on the identity's integrand.
    const BoundReport b2 = theorem2_bound(f, sigma, cfg, quad, 2.0);
    CHECK(b2.rhs * cfg.r0 / cfg.r >= std::abs(id.rhs) - 1e-12);
  }
  CHECK_THROWS(theorem2_bound(random_field(d2, 1, 0.2, rng), random_atoms(d2, 3, rng), cfg, quad, 0.5));
}

TEST_CASE("zero measure and homogeneity") {
  Rng rng(8);
  const SphereDim d2(2);
  const ShellConfig cfg(0.3, 0.6);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 40);
  const HarmonicField f = random_field(d2, 2, 0.2, rng);
  const DiscreteSignedMeasure zero(d2, {pt({0, 0, 1})}, {0.0});
  const BoundReport z = theorem2_bound(f, zero, cfg, quad, 2.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  const DiscreteSignedMeasure sigma = random_atoms(d2, 10, rng);
  const double alpha = -3.0;
  const BoundReport a = theorem2_bound(f, sigma, cfg, quad, 2.0);
  const BoundReport b = theorem2_bound(f, sigma.scaled(alpha), cfg, quad, 2.0);
  CHECK(b.lhs == doctest::Approx(3.0 * a.lhs).epsilon(1e-13));
  CHECK(b.rhs == doctest::Approx(3.0 * a.rhs).epsilon(1e-13));
  const IdentityReport ia = kh_identity(f, sigma, cfg, quad);
  const IdentityReport ib = kh_identity(f, sigma.scaled(alpha), cfg, quad);
  CHECK(ib.rhs == doctest::Approx(alpha * ia.rhs).epsilon(1e-13));
}

TEST_CASE("quadrature error bounds") {
  Rng rng(9);
  const SphereDim d2(2);
  const ShellConfig cfg(0.3, 0.7);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 60);
  const QuadratureMeasure mu = sigma_d(d2, 120);
  const HarmonicField f = random_field(d2, 3, 0.24, rng);

  const BoundReport same = corollary3_error(f, mu, mu.as_signed(), cfg, quad, 2.0);
  CHECK(same.lhs < 1e-13);
  CHECK(same.rhs < 1e-12);

  const BoundReport b100 = corollary3_error(f, mu, partition_rule(mu, equal_area_partition(d2, 100)), cfg, quad, 2.0);
  const BoundReport b400 = corollary3_error(f, mu, partition_rule(mu, equal_area_partition(d2, 400)), cfg, quad, 2.0);
  CHECK(b100.slack >= -1e-9);
  CHECK(b400.slack >= -1e-9);
  CHECK(b400.lhs < b100.lhs);
  CHECK(b400.rhs < b100.rhs);
  CHECK(b100.surrogate_budget >= 0.0);
  CHECK(b100.surrogate_budget < 1e-12);

  // Constant restriction and a mass-matched rule.
  const HarmonicField c = make_field(d2, {{{0, 0, 0}, 1.7}});
  const BoundReport m = corollary3_error(c, mu, partition_rule(mu, equal_area_partition(d2, 50)), cfg, quad, 1.0);
  CHECK(m.lhs < 1e-13);
}

TEST_CASE("partition bound for potentials") {
  const SphereDim d2(2);
  const QuadratureMeasure mu = sigma_d(d2, 120);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 40);
  const double r = 0.5;

  const SpherePartition whole = equal_area_partition(d2, 1);
  const Theorem4Report one = theorem4a_bound(mu, whole, r, quad);
  CHECK(one.bound == doctest::Approx(2.0 / std::pow(0.5, 3)).epsilon(1e-12));
  CHECK(one.measured_sup <= one.bound);

  const Theorem4Report t256 = theorem4a_bound(mu, equal_area_partition(d2, 256), r, quad);
  const Theorem4Report t1024 = theorem4a_bound(mu, equal_area_partition(d2, 1024), r, quad);
  CHECK(t256.measured_sup <= t256.bound);
  CHECK(t1024.measured_sup <= t1024.bound);
  CHECK(t1024.measured_sup < t256.measured_sup);
  CHECK(t1024.bound == doctest::Approx(theorem4_bound(d2, mu.total_mass(), t1024.partition_norm, r)));

  // All of mu sits on the scattering points: sigma = 0.
  const Scattering c = centers(d2, 64);
  std::vector<double> w(64, 1.0 / 64);
  const QuadratureMeasure atoms(d2, c.points(), w, 0);
  const Theorem4Report zero = theorem4a_bound(atoms, match_partition_to_scattering(equal_area_partition(d2, 64), c), r, quad);
  CHECK(zero.measured_sup <= 1e-14);
  CHECK(zero.measured_sup <= zero.bound);

  const auto masses = region_masses(mu, equal_area_partition(d2, 32));
  double total = 0.0;
  for (double a : masses) total += a;
  CHECK(total == doctest::Approx(mu.total_mass()).epsilon(1e-12));
}

TEST_CASE("partition bound on random matched partitions") {
  Rng rng(13);
  const SphereDim d2(2);
  const QuadratureMeasure mu = sigma_d(d2, 40);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 20);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const SpherePartition p = equal_area_partition(d2, n);
    // one random point per region by rejection
    std::vector<std::optional<SpherePoint>> reps(n);
    std::size_t filled = 0;
    while (filled < n) {
      const SpherePoint x = random_point(d2, rng);
      auto& slot = reps[p.locate(x)];
      if (!slot) {
        slot = x;
        ++filled;
      }
    }
    std::vector<SpherePoint> pts;
    for (auto& s : reps) pts.push_back(*s);
    const SpherePartition matched = match_partition_to_scattering(p, Scattering(d2, pts));
    const double r = std::uniform_real_distribution<double>(0.05, 0.9)(rng);
    const Theorem4Report t = theorem4a_bound(mu, matched, r, quad);
    if (t.measured_sup > t.bound) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("epsilon pipeline") {
  const SphereDim d2(2);
  const QuadratureMeasure mu = sigma_d(d2, 120);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 30);
  const Scattering e = centers(d2, 1024);
  const double threshold = gate_threshold(e, mu.total_mass());

  const Theorem4Report rep = theorem4b_pipeline(e, mu, 2 * threshold, 0.3, quad);
  CHECK(rep.diagnosis.empty());
  CHECK(*rep.gate == doctest::Approx(0.5));
  CHECK(*rep.partition_ratio < 1.0);
  CHECK(*rep.r_admissible_upper > 0.3);
  CHECK(rep.radii.size() == 8);
  for (const auto& c : rep.radii) {
    CHECK(c.r > 0.3);
    CHECK(c.r < *rep.r_admissible_upper);
    CHECK(c.measured_sup <= 2 * threshold);
    CHECK(c.measured_sup <= c.bound);
  }

  CHECK_THROWS_AS(theorem4b_pipeline(e, mu, 0.9 * threshold, 0.3, quad), GateFailure);
  // A fixed epsilon of 0.5 is below the gate threshold for 1024 centers.
  CHECK(threshold > 0.5);
  try {
    theorem4b_pipeline(e, mu, 0.5, 0.3, quad);
    FAIL("gate should fail");
  } catch (const GateFailure& g) {
    CHECK(std::string(g.what()).find("mesh norm too large") != std::string::npos);
    CHECK(*g.report().gate >= 1.0);
  }

  const Scattering single(d2, {pt({0, 0, 1})});
  CHECK_THROWS_AS(theorem4b_pipeline(single, mu, 10.0, 0.3, quad), GateFailure);

  // Window check: r0 above the admissible upper end.
  try {
    theorem4b_pipeline(e, mu, 2 * threshold, 0.95, quad);
    FAIL("window should be empty");
  } catch (const GateFailure& g) {
    CHECK(std::string(g.what()).find("window") != std::string::npos);
  }
}

TEST_CASE("scaling study") {
  const SphereDim d2(2);
  const QuadratureMeasure mu = sigma_d(d2, 120);
  const QuadratureMeasure quad = QuadratureMeasure::product_rule(d2, 30);
  const ScalingStudy s = scaling_study(d2, {16, 64, 256, 1024}, 0.5, mu, quad);
  REQUIRE(s.rows.size() == 4);
  const double k = s.rows[0].bound / s.rows[0].partition_norm;
  int inversions = 0;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(s.rows[i].bound / s.rows[i].partition_norm == doctest::Approx(k).epsilon(1e-12));
    CHECK(s.rows[i].measured_sup <= s.rows[i].bound);
    if (i > 0 && s.rows[i].measured_sup > s.rows[i - 1].measured_sup) {
      ++inversions;
      CHECK(s.rows[i].measured_sup <= 1.1 * s.rows[i - 1].measured_sup);
    }
  }
  CHECK(inversions <= 1);
  CHECK(s.partition_exponent == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(s.sup_exponent < 0.0);
  CHECK_THROWS(scaling_study(d2, {64, 16}, 0.5, mu, quad));
}

TEST_CASE("log-log slope") {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.7));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK_THROWS(loglog_slope({1.0}, {1.0}));
}
