#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "rdt/restricted.hpp"
#include "rdt/sampling.hpp"

using namespace rdt;

namespace {

const std::vector<Vec3> kOctahedron = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                                       Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> p;
  const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1 - (2 * i + 1.0) / n;
    const double r = std::sqrt(1 - z * z);
    p.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return p;
}

struct Fixture {
  SurfacePtr surface = make_surface("sphere");
  CoverContext cover = make_cover_context(*surface, 0.05);
  LfsOracle lfs = LfsOracle::analytic(surface);

  RestrictedComplex build(const std::vector<Vec3>& sites) const {
    return restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*surface)), *surface, lfs, cover);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("segment roots on the unit sphere") {
  const auto s = make_surface("sphere");
  const auto r = segment_roots(*s, Vec3(0, 0, 0), Vec3(2, 0, 0));
  REQUIRE(r.roots.size() == 1);
  CHECK((r.roots[0] - Vec3(1, 0, 0)).norm() < 1e-9);
  CHECK_FALSE(r.grazing);

  CHECK(segment_roots(*s, Vec3(2, 2, 0), Vec3(3, 2, 1)).roots.empty());

  const auto chord = segment_roots(*s, Vec3(-2, 0.5, 0), Vec3(2, 0.5, 0));
  REQUIRE(chord.roots.size() == 2);
  CHECK(std::abs(chord.roots[0].x() + std::sqrt(0.75)) < 1e-9);
  CHECK(std::abs(chord.roots[1].x() - std::sqrt(0.75)) < 1e-9);

  const auto tangent = segment_roots(*s, Vec3(-2, 1, 0), Vec3(2, 1, 0));
  CHECK(tangent.grazing);
  CHECK((tangent.grazing_point - Vec3(0, 1, 0)).norm() < 1e-3);

  // Overriding an endpoint that sits on the surface.
  const auto over = segment_roots(*s, Vec3(1, 0, 0), Vec3(3, 0, 0), -1e-9, std::nullopt);
  REQUIRE(over.roots.size() == 1);
  CHECK((over.roots[0] - Vec3(1, 0, 0)).norm() < 1e-6);
}

TEST_CASE("segment roots on a torus") {
  const auto t = make_surface("torus");  // R = 2, r = 0.5
  const auto r = segment_roots(*t, Vec3(-3, 0, 0), Vec3(3, 0, 0));
  REQUIRE(r.roots.size() == 4);
  CHECK(std::abs(r.roots[0].x() + 2.5) < 1e-9);
  CHECK(std::abs(r.roots[1].x() + 1.5) < 1e-9);
  CHECK(std::abs(r.roots[2].x() - 1.5) < 1e-9);
  CHECK(std::abs(r.roots[3].x() - 2.5) < 1e-9);
  // Through the hole along the axis: no roots.
  CHECK(segment_roots(*t, Vec3(0, 0, -3), Vec3(0, 0, 3)).roots.empty());
}

TEST_CASE("octahedron sites on the unit sphere") {
  const auto& fx = fixture();
  const auto rc = fx.build(kOctahedron);
  CHECK(rc.vertices().size() == 8);
  for (const auto& v : rc.vertices()) {
    CHECK(std::abs(v.position.cwiseAbs().maxCoeff() - 1 / std::sqrt(3.0)) < 1e-9);
    CHECK(std::abs(v.tangency_margin - 1) < 1e-9);
  }
  CHECK(rc.edges().size() == 12);
  for (const auto& e : rc.edges()) {
    CHECK_FALSE(e.closed);
    CHECK(e.start >= 0);
    CHECK(e.end >= 0);
    CHECK(e.start != e.end);
    // Quarter of a great circle through two octant corners.
    CHECK(std::abs(e.length - std::acos(1.0 / 3.0)) < 1e-3);
    for (const Vec3& x : e.polyline) {
      CHECK(std::abs(x.norm() - 1) < 1e-8);
      const auto& F = rc.voronoi().faces()[static_cast<std::size_t>(e.face)];
      CHECK(std::abs(F.bisector.signed_distance(x)) < 1e-10);
    }
  }
  REQUIRE(rc.cells().size() == 6);
  const double expected = std::sqrt(2 - 2 / std::sqrt(3.0));
  for (const auto& c : rc.cells()) {
    CHECK(c.edges.size() == 4);
    CHECK(c.boundary_loops == 1);
    CHECK(c.boundary_closed);
    CHECK(c.components == 1);
    CHECK(c.ratio() <= expected + 1e-12);
    CHECK(c.ratio() > expected - 1.5 * 0.05);
  }
  CHECK(rc.handle_count() == std::vector<int>{0});
  const auto rep = check_properties(rc, *fx.surface);
  CHECK(rep.all_pass());
  CHECK(rep.nonempty_cells == 6);
  CHECK(rep.nonempty_faces == 12);
}

TEST_CASE("two antipodal sites") {
  const auto& fx = fixture();
  const auto rc = fx.build({Vec3(0, 0, 1), Vec3(0, 0, -1)});
  CHECK(rc.vertices().empty());
  REQUIRE(rc.edges().size() == 1);
  const auto& e = rc.edges()[0];
  CHECK(e.closed);
  CHECK(e.from_seed);
  CHECK(std::abs(e.length - 2 * std::numbers::pi) < 2e-3);
  for (const Vec3& x : e.polyline) CHECK(std::abs(x.z()) < 1e-12);
  const auto rep = check_properties(rc, *fx.surface);
  CHECK_FALSE(rep.B);
  CHECK(rep.A);
  CHECK(rep.C);
  for (const auto& c : rc.cells()) CHECK(c.boundary_loops == 1);
}

TEST_CASE("dense sample passes all properties") {
  const auto& fx = fixture();
  const auto sites = fibonacci_sphere(200);
  const auto rc = fx.build(sites);
  const auto rep = check_properties(rc, *fx.surface);
  for (const auto& w : rep.witnesses) MESSAGE(w.property << ": " << w.what);
  CHECK(rep.all_pass());
  CHECK(rep.nonempty_cells == 200);
  // Euler: V - E + F = 2 on the sphere.
  CHECK(static_cast<int>(rc.vertices().size()) - static_cast<int>(rc.edges().size()) + 200 == 2);
  double worst = 0;
  for (const auto& c : rc.cells()) worst = std::max(worst, c.ratio());
  CHECK(worst < 0.3);
}

TEST_CASE("sites on one great circle") {
  const auto& fx = fixture();
  // The common Voronoi edge is the axis, which crosses the sphere twice.
  const double c = std::cos(2 * std::numbers::pi / 3), s = std::sin(2 * std::numbers::pi / 3);
  const auto rc = fx.build({Vec3(1, 0, 0), Vec3(c, s, 0), Vec3(c, -s, 0)});
  const auto rep = check_properties(rc, *fx.surface);
  CHECK_FALSE(rep.C);
  CHECK(rc.vertices().size() == 2);
  for (const auto& v : rc.vertices()) CHECK(std::abs(std::abs(v.position.z()) - 1) < 1e-9);
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("torus with a coarse sample has handles in a cell") {
  const auto t = make_surface("torus");
  const auto cover = make_cover_context(*t, 0.03);
  const auto lfs = LfsOracle::analytic(t);
  // Two sites on the outer equator: each cell is a band around the tube.
  const std::vector<Vec3> sites = {Vec3(1.25, 0, 0), Vec3(-1.25, 0, 0), Vec3(0, 1.25, 0), Vec3(0, 0, 0.25)};
  const auto rc = restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*t)), *t, lfs, cover);
  const auto rep = check_properties(rc, *t);
  CHECK_FALSE(rep.A);
}

TEST_CASE("hessian bound holds in its band") {
  std::mt19937_64 rng(7);
  for (const auto& name : catalog_names()) {
    const auto s = make_surface(name);
    const double K = s->hessian_bound();
    const auto cover = dense_cover(*s, 0.1);
    std::uniform_real_distribution<double> off(-1 / K, 1 / K);
    std::uniform_int_distribution<std::size_t> pick(0, cover.points.size() - 1);
    double worst = 0;
    for (int k = 0; k < 2000; ++k) {
      const std::size_t i = pick(rng);
      const Vec3 x = cover.points[i] + off(rng) * cover.normals[i];
      if (std::abs(s->value(x)) > 1 / K) continue;
      const double e = 1e-6;
      Eigen::Matrix3d H;
      for (int c = 0; c < 3; ++c) {
        const Vec3 d = e * Vec3::Unit(c);
        H.col(c) = (s->gradient(x + d) - s->gradient(x - d)) / (2 * e);
      }
      const Eigen::Matrix3d Hs = 0.5 * (H + H.transpose());
      worst = std::max(worst, Hs.cwiseAbs().colwise().sum().maxCoeff() > 0
                                  ? Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(Hs).eigenvalues().cwiseAbs().maxCoeff()
                                  : 0.0);
    }
    INFO(name);
    CHECK(worst <= 1.05 * K);
  }
}

TEST_CASE("cospherical sites cluster Voronoi vertices at the centre") {
  const auto s = make_surface("two_spheres");
  const auto cover = make_cover_context(*s, 0.04);
  const auto lfs = LfsOracle::analytic(s);
  SampleSpec spec;
  spec.epsilon = 0.3245;
  spec.seed = 2;
  const auto sites = generate(*s, lfs, cover, spec).sites;
  const auto rc = restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*s)), *s, lfs, cover);
  int unmatched = 0;
  for (const auto& f : rc.faces()) unmatched += f.unmatched_exits;
  CHECK(unmatched == 0);
  CHECK(check_properties(rc, *s).all_pass());
}
