#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rdt/curves2d.hpp"

using namespace rdt;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::vector<Vec2> ngon(const PlaneCurve& c, int n, double phase = 0.1) {
  std::vector<Vec2> s;
  for (int i = 0; i < n; ++i) s.push_back(c.point(phase + kTwoPi * i / n));
  return s;
}

}  // namespace

TEST_CASE("curve geometry") {
  const auto e = make_curve("ellipse");
  for (double t : {0.0, 0.4, 1.3, 2.9, 4.4}) {
    const Vec2 p = e->point(t);
    CHECK(p.x() * p.x() / 2.25 + p.y() * p.y() == doctest::Approx(1).epsilon(1e-14));
    CHECK(std::abs(e->value(p)) < 1e-14);
    // Tangent by central differences.
    const Vec2 fd = (e->point(t + 1e-6) - e->point(t - 1e-6)).normalized();
    CHECK((fd - e->tangent(t)).norm() < 1e-8);
    CHECK(e->normal(t).dot(p) > 0);
  }
  // lfs at the ends of the major axis is the radius of curvature b^2 / a.
  CHECK(e->lfs(0) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
  CHECK(e->lfs(std::numbers::pi / 2) == doctest::Approx(std::hypot(1.0, 0.0)).epsilon(1e-14));
  CHECK(make_curve("circle", {{"radius", 2}})->lfs(1) == 2);
  CHECK_THROWS_AS(make_curve("ellipse", {{"c", 1}}), CurveError);
  CHECK_THROWS_AS(make_curve("square"), CurveError);
}

TEST_CASE("flower numeric lfs against the radius of curvature") {
  const auto f = make_curve("flower");
  // lfs never exceeds the radius of curvature; at a trough the curvature radius governs.
  const double k = 5, a = 0.2;
  auto curvature = [&](double t) {
    const double r = 1 + a * std::cos(k * t), dr = -a * k * std::sin(k * t), ddr = -a * k * k * std::cos(k * t);
    return (r * r + 2 * dr * dr - r * ddr) / std::pow(r * r + dr * dr, 1.5);
  };
  for (int i = 0; i < 200; ++i) {
    const double t = kTwoPi * i / 200;
    CHECK(f->lfs(t) <= 1 / std::abs(curvature(t)) + f->lfs_error() + 1e-9);
    CHECK(f->lfs(t) > 0);
  }
  const double trough = std::numbers::pi / 5;
  CHECK(f->lfs(trough) == doctest::Approx(1 / std::abs(curvature(trough))).epsilon(2e-2));
  CHECK(f->lfs_error() < 1e-3);
}

TEST_CASE("regular n-gon") {
  const auto c = make_curve("circle");
  for (int n : {3, 7, 40}) {
    const auto r = rdt2d(ngon(*c, n), *c);
    CHECK(static_cast<int>(r.edges.size()) == n);
    for (const auto& e : r.edges) CHECK((e[1] - e[0] == 1 || (e[0] == 0 && e[1] == n - 1)));
    for (const auto& v : r.vertices) {
      const double du = (v.point - r.sites[static_cast<std::size_t>(v.u)]).norm();
      const double dw = (v.point - r.sites[static_cast<std::size_t>(v.w)]).norm();
      CHECK(std::abs(du - dw) < 1e-12);
    }
    const auto rep = verify_polygon(r, *c);
    CHECK(rep.valid());
    CHECK(rep.cycles == 1);
  }
}

TEST_CASE("two sites give the circle case") {
  const auto c = make_curve("circle");
  const auto r = rdt2d({Vec2(1, 0), Vec2(-1, 0)}, *c);
  CHECK(r.degenerate);
  REQUIRE(r.edges.size() == 1);
  CHECK(r.hits[0] == 2);
  const auto rep = verify_polygon(r, *c);
  CHECK_FALSE(rep.valid());
  CHECK_FALSE(rep.single_hits);
  CHECK_FALSE(rep.witnesses.empty());
}

TEST_CASE("certified samples reconstruct one polygon") {
  for (const auto& name : curve_catalog_names()) {
    CAPTURE(name);
    const auto c = make_curve(name);
    const auto cover = curve_cover(*c);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      CurveSampleSpec spec;
      spec.epsilon = 0.3245;
      spec.seed = seed;
      const auto set = generate_curve_sample(*c, cover, spec);
      CHECK(set.certificate.epsilon <= 0.3245);
      CHECK(verify_curve_sample(*c, set.sites, cover).epsilon == doctest::Approx(set.certificate.epsilon));
      const auto rep = verify_polygon(rdt2d(set.sites, *c), *c);
      CHECK(rep.valid());
    }
  }
}

TEST_CASE("sample gap breaks the polygon") {
  // Thin ellipse sampled densely on top but only at the ends below: top sites own the
  // bottom points opposite them.
  const auto c = make_curve("ellipse", {{"a", 1}, {"b", 0.1}});
  std::vector<Vec2> sites{c->point(0), c->point(std::numbers::pi)};
  for (double x : {-0.6, -0.2, 0.2, 0.6}) sites.push_back(Vec2(x, 0.1 * std::sqrt(1 - x * x)));
  const auto cover = curve_cover(*c);
  CHECK(verify_curve_sample(*c, sites, cover).epsilon > 1);
  const auto rep = verify_polygon(rdt2d(sites, *c), *c);
  CHECK_FALSE(rep.valid());
  REQUIRE_FALSE(rep.witnesses.empty());
  CHECK(rep.witnesses.front().site >= 0);
}

TEST_CASE("certificate oracle") {
  // Sites at the vertices of a regular n-gon on the unit circle: the worst point is the
  // arc midpoint at distance 2 sin(pi / 2n).
  const auto c = make_curve("circle");
  const auto cover = curve_cover(*c);
  for (int n : {6, 13}) {
    const auto cert = verify_curve_sample(*c, ngon(*c, n), cover);
    CHECK(cert.epsilon == doctest::Approx(2 * std::sin(std::numbers::pi / (2 * n))).epsilon(1e-10));
    CHECK(cert.epsilon_bound >= cert.epsilon);
  }
}

TEST_CASE("svg export") {
  const auto c = make_curve("ellipse");
  std::ostringstream out;
  write_svg(out, *c, rdt2d(ngon(*c, 12), *c));
  const std::string s = out.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("<line") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
}
