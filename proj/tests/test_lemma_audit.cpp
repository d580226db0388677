#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rdt/constants.hpp"
#include "rdt/lemma_audit.hpp"
#include "rdt/sampling.hpp"

using namespace rdt;

namespace {

constexpr double kDeg = std::numbers::pi / 180;

AuditConfig trials(int n, std::uint64_t seed = 1) {
  AuditConfig c;
  c.trials = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("constant thresholds") {
  const Constants& c = constants();
  CHECK(c.xi_threshold > 0.440136);
  CHECK(c.xi_threshold < 0.440138);
  CHECK(c.kappa_threshold > 0.331408);
  CHECK(c.kappa_threshold < 0.331410);
  // Independent closed form for xi.
  CHECK(std::abs(c.xi - std::sqrt((std::sqrt(5.0) - 1) / 2)) < 1e-15);
  const double s = std::sqrt(3.0) * c.kappa;
  CHECK(std::asin(s) + std::acos(s) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(c.eta_domain == doctest::Approx(0.971736).epsilon(1e-6));
}

TEST_CASE("eta") {
  CHECK(eta(0) == 0);
  CHECK(eta(0.3245) / kDeg < 19.21);
  CHECK(eta(0.3245) / kDeg > 19.21 - 0.01);
  CHECK(eta(0.4132) / kDeg < 25.008);
  CHECK(eta(0.4132) / kDeg > 25.008 - 0.01);
  double prev = -1;
  for (double d = 0; d < 0.9717; d += 1e-3) {
    const double e = eta(d);
    CHECK(e > prev);
    if (d > 0 && d <= 0.9) CHECK(e >= d);
    prev = e;
  }
  // Leading terms of the series.
  CHECK(eta(1e-2) == doctest::Approx(1e-2 + 7.0 / 24 * 1e-6).epsilon(1e-9));
  CHECK_THROWS_AS(eta(-0.1), AuditError);
  CHECK_THROWS_AS(eta(0.98), AuditError);
}

TEST_CASE("triangle normal bound and feature translation") {
  CHECK(triangle_normal_bound(0.4132, 49.023 * kDeg) < 0.906231);
  CHECK(1 / std::tan(49.023 * kDeg / 2) == doctest::Approx(2.1932).epsilon(1e-4));
  CHECK(triangle_normal_bound(0.3245 / 0.6755, 53.932 * kDeg) < 0.9442);
  CHECK(triangle_normal_bound(0.37, 90 * kDeg) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK_THROWS_AS(triangle_normal_bound(0.1, 0), AuditError);
  CHECK_THROWS_AS(triangle_normal_bound(0.1, std::numbers::pi), AuditError);

  CHECK(feature_translation(0.3245).distance_factor == doctest::Approx(0.3245 / 0.6755).epsilon(1e-15));
  CHECK(feature_translation(0).lfs_factor == 1);
  CHECK(feature_translation(0).distance_factor == 0);
  CHECK(feature_translation(0.5).lfs_factor == 2);
  CHECK(feature_translation(0.5).distance_factor == 1);
  CHECK_THROWS_AS(feature_translation(1), AuditError);
}

TEST_CASE("sampled audits hold on analytic surfaces") {
  for (const char* name : {"sphere", "torus", "two_spheres"}) {
    CAPTURE(name);
    const auto s = make_surface(name);
    const auto lfs = LfsOracle::analytic(s);
    for (const auto& r : {audit_abovebelow(*s, lfs, trials(10000)), audit_normal_variation(*s, lfs, trials(10000)),
                          audit_triangle_normal(*s, lfs, trials(10000)),
                          audit_feature_translation(*s, lfs, trials(10000))}) {
      CAPTURE(r.audit);
      CHECK(r.trials == 10000);
      CHECK(r.pass());
      CHECK(r.passed == r.trials);
      CHECK(r.worst_margin >= -AuditConfig{}.tolerance);
    }
  }
}

TEST_CASE("audits are reproducible per seed") {
  const auto s = make_surface("torus");
  const auto lfs = LfsOracle::analytic(s);
  const auto a = audit_normal_variation(*s, lfs, trials(500, 7));
  const auto b = audit_normal_variation(*s, lfs, trials(500, 7));
  const auto c = audit_normal_variation(*s, lfs, trials(500, 8));
  CHECK(a.worst_margin == b.worst_margin);
  CHECK(a.skipped == b.skipped);
  CHECK(a.worst_margin != c.worst_margin);
}

TEST_CASE("sphere normal variation is the chord angle") {
  // On the unit sphere the normal angle is 2 asin(delta / 2), strictly below eta.
  for (double d : {0.01, 0.2, 0.5, 0.9}) CHECK(2 * std::asin(d / 2) <= eta(d));
  const auto s = make_surface("sphere");
  const auto r = audit_normal_variation(*s, LfsOracle::analytic(s), trials(2000));
  CHECK(r.pass());
  CHECK(r.worst_margin > 0);
}

TEST_CASE("torus inner equator has smaller abovebelow margins") {
  const auto s = make_surface("torus");
  const auto lfs = LfsOracle::analytic(s);
  const auto r = audit_abovebelow(*s, lfs, trials(10000));
  const auto sph = make_surface("sphere");
  const auto q = audit_abovebelow(*sph, LfsOracle::analytic(sph), trials(10000));
  CHECK(r.pass());
  CHECK(q.pass());
  // Margins are relative to lfs; both positive.
  CHECK(r.worst_margin > 0);
  CHECK(q.worst_margin > 0);
}

TEST_CASE("an inflated lfs breaks the audits") {
  // Mutation: an oracle that overstates lfs fourfold must produce counterexamples.
  struct Inflated final : ImplicitSurface {
    SurfacePtr base = make_surface("torus");
    std::string name() const override { return "torus-mutant"; }
    std::map<std::string, double> parameters() const override { return base->parameters(); }
    double value(const Vec3& x) const override { return base->value(x); }
    Vec3 gradient(const Vec3& x) const override { return base->gradient(x); }
    Box3 bounding_box() const override { return base->bounding_box(); }
    std::optional<double> analytic_lfs(const Vec3& x) const override { return 4 * *base->analytic_lfs(x); }
    double lfs_upper_bound() const override { return 4 * base->lfs_upper_bound(); }
    double hessian_bound() const override { return base->hessian_bound(); }
    int reference_euler(int c) const override { return base->reference_euler(c); }
  };
  const auto m = std::make_shared<Inflated>();
  const auto lfs = LfsOracle::analytic(m);
  CHECK_FALSE(audit_normal_variation(*m, lfs, trials(3000)).pass());
  CHECK_FALSE(audit_triangle_normal(*m, lfs, trials(3000)).pass());
}

TEST_CASE("complex audits on a 0.3-sample") {
  for (const char* name : {"sphere", "torus"}) {
    CAPTURE(name);
    const auto s = make_surface(name);
    const auto lfs = LfsOracle::analytic(s);
    const auto cover = make_cover_context(*s, 0.04);
    SampleSpec spec;
    spec.epsilon = 0.3;
    const auto set = generate(*s, lfs, cover, spec);
    const auto rc = restrict_to_surface(voronoi_of(set.sites, voronoi_clip_box(*s)), *s, lfs, cover);
    const auto rb = audit_raybisector(*s, lfs, rc, trials(10000));
    CHECK(rb.trials == 10000);
    CHECK(rb.pass());
    const auto vu = audit_vertex_uniqueness(*s, lfs, rc);
    CHECK(vu.trials > 0);
    CHECK(vu.pass());
    const auto es = audit_edge_structure(*s, lfs, rc);
    CHECK(es.trials > 0);
    CHECK(es.pass());
    const auto pi = audit_projection_injectivity(*s, lfs, cover, trials(2000));
    CHECK(pi.trials == 2000);
    CHECK(pi.pass());
  }
}

TEST_CASE("two-site sphere faces are outside the edge lemma") {
  const auto s = make_surface("sphere");
  const auto lfs = LfsOracle::analytic(s);
  const auto cover = make_cover_context(*s, 0.05);
  const auto rc = restrict_to_surface(voronoi_of({Vec3(0, 0, 1), Vec3(0, 0, -1)}, voronoi_clip_box(*s)), *s, lfs, cover);
  const auto es = audit_edge_structure(*s, lfs, rc);
  CHECK(es.trials == 0);
  CHECK(es.skipped == 1);
  const auto vu = audit_vertex_uniqueness(*s, lfs, rc);
  CHECK(vu.trials == 0);
}

TEST_CASE("tangent Voronoi line is flagged") {
  // Three sites around (1, 0, 0) in the plane z = 0: their equidistant line x = 1, y = 0 touches the sphere.
  const auto s = make_surface("sphere");
  const auto lfs = LfsOracle::analytic(s);
  const auto cover = make_cover_context(*s, 0.05);
  std::vector<Vec3> sites;
  for (int k = 0; k < 3; ++k) {
    const double a = 2 * std::numbers::pi * k / 3 + 0.1;
    sites.push_back(Vec3(1 + 0.2 * std::cos(a), 0.2 * std::sin(a), 0));
  }
  const auto rc = restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*s)), *s, lfs, cover);
  const auto vu = audit_vertex_uniqueness(*s, lfs, rc);
  REQUIRE(vu.trials == 1);
  CHECK_FALSE(vu.pass());
  REQUIRE(vu.witnesses.size() == 1);
  CHECK((vu.witnesses[0].q - Vec3(1, 0, 0)).norm() < 1e-3);
}

TEST_CASE("projection injectivity detects folds") {
  const auto s = make_surface("sphere");
  const auto lfs = LfsOracle::analytic(s);
  const auto cover = make_cover_context(*s, 0.04);
  CHECK(audit_projection_injectivity(*s, lfs, cover, trials(300)).pass());
  AuditConfig big = trials(50);
  big.radius_factor = 1.9;
  // Without forcing, no admissible direction exists and every ball is skipped.
  const auto skipped = audit_projection_injectivity(*s, lfs, cover, big);
  CHECK(skipped.trials == 0);
  CHECK(skipped.skipped > 0);
  big.force_normal_direction = true;
  const auto r = audit_projection_injectivity(*s, lfs, cover, big);
  CHECK(r.trials == 50);
  CHECK(r.counterexamples == 50);
}
