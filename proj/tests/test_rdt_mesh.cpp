#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "rdt/rdt_mesh.hpp"

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

std::vector<Vec3> random_on(const ImplicitSurface& s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box3 b = s.bounding_box();
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec3 p = b.lo + (b.hi - b.lo).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    try {
      out.push_back(closest_point(s, p).point.x);
    } catch (const SurfaceError&) {
    }
  }
  return out;
}

struct Run {
  RestrictedComplex rc;
  RdtMesh mesh;
};

Run run(const SurfacePtr& s, const CoverContext& cover, const std::vector<Vec3>& sites) {
  const LfsOracle lfs = LfsOracle::analytic(s);
  Run r{restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*s)), *s, lfs, cover), {}};
  r.mesh = dualize(r.rc, *s);
  return r;
}

const CoverContext& sphere_cover() {
  static const CoverContext c = make_cover_context(*make_surface("sphere"), 0.05);
  return c;
}

std::set<std::array<int, 3>> delaunay_triangles(const std::vector<Vec3>& sites) {
  std::set<std::array<int, 3>> out;
  const DelaunayComplex d = build_delaunay(sites);
  for (const auto& t : d.tetrahedra()) {
    if (t.infinite()) continue;
    for (int i = 0; i < 4; ++i) {
      std::array<int, 3> k{};
      int q = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) k[static_cast<std::size_t>(q++)] = t.v[static_cast<std::size_t>(j)];
      std::sort(k.begin(), k.end());
      out.insert(k);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("octahedron") {
  const auto s = make_surface("sphere");
  const auto r = run(s, sphere_cover(), kOctahedron);
  CHECK(r.mesh.vertices.size() == 6);
  CHECK(r.mesh.faces.size() == 8);
  CHECK(r.mesh.edges.size() == 12);
  // Hull oracle: one triangle per octant, one site from each axis pair.
  std::vector<std::array<int, 3>> hull;
  for (int x : {0, 1})
    for (int y : {2, 3})
      for (int z : {4, 5}) hull.push_back({x, y, z});
  CHECK(r.mesh.triangle_keys() == hull);
  const auto t = validate(r.mesh, *s);
  CHECK(t.manifold);
  CHECK(t.orientable);
  CHECK(t.coherently_oriented);
  CHECK(t.euler == 2);
  CHECK(t.component_count == 1);
  CHECK(t.homeomorphic());
  CHECK(brute_force_rdt(kOctahedron, *s).triangle_keys() == hull);
}

TEST_CASE("two antipodal sites give a degenerate mesh") {
  const auto s = make_surface("sphere");
  const auto r = run(s, sphere_cover(), {Vec3(0, 0, 1), Vec3(0, 0, -1)});
  CHECK(r.mesh.degenerate());
  CHECK(r.mesh.edges.size() == 1);
  const auto t = validate(r.mesh, *s);
  CHECK(t.degenerate);
  CHECK_FALSE(t.manifold);
  CHECK_FALSE(t.homeomorphic());
}

TEST_CASE("dense sphere sample") {
  const auto s = make_surface("sphere");
  const auto sites = fibonacci_sphere(200);
  const auto r = run(s, sphere_cover(), sites);
  CHECK(r.mesh.triangles().size() == 2 * sites.size() - 4);
  const auto t = validate(r.mesh, *s);
  CHECK(t.homeomorphic());
  CHECK(t.coherently_oriented);
  CHECK(t.edge_incidence == std::map<int, int>{{2, 3 * 200 - 6}});
  const auto del = delaunay_triangles(sites);
  std::set<std::array<int, 2>> del_edges;
  for (const auto& k : del) {
    del_edges.insert({k[0], k[1]});
    del_edges.insert({k[0], k[2]});
    del_edges.insert({k[1], k[2]});
  }
  for (const auto& f : r.mesh.faces) {
    if (f.size() == 3) {
      std::array<int, 3> k{f[0], f[1], f[2]};
      std::sort(k.begin(), k.end());
      CHECK(del.count(k));
    }
    // Polygonal faces: only their sides are determined, the fan is a choice.
    for (std::size_t q = 0; q < f.size(); ++q)
      CHECK(del_edges.count({std::min(f[q], f[(q + 1) % f.size()]), std::max(f[q], f[(q + 1) % f.size()])}));
  }

  SUBCASE("deleted triangle") {
    RdtMesh m = r.mesh;
    m.faces.pop_back();
    const auto bad = validate(m, *s);
    CHECK_FALSE(bad.edge_manifold);
    CHECK(bad.edge_incidence.at(1) == 3);
    CHECK_FALSE(bad.homeomorphic());
    CHECK_FALSE(bad.coherently_oriented);
  }
  SUBCASE("flipped triangle") {
    RdtMesh m = r.mesh;
    std::reverse(m.faces[0].begin(), m.faces[0].end());
    const auto flipped = validate(m, *s);
    CHECK(flipped.orientable);
    CHECK_FALSE(flipped.coherently_oriented);
  }
}

TEST_CASE("oracle equivalence on random sites") {
  const auto s = make_surface("sphere");
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto sites = random_on(*s, 20, seed);
    const auto r = run(s, sphere_cover(), sites);
    CHECK(r.mesh.triangle_keys() == brute_force_rdt(sites, *s).triangle_keys());
  }
  const auto four = random_on(*s, 4, 9);
  const auto r4 = run(s, sphere_cover(), four);
  CHECK(r4.mesh.faces.size() == 4);
  CHECK(r4.mesh.triangle_keys() == brute_force_rdt(four, *s).triangle_keys());

  const auto t = make_surface("torus");
  const auto tcover = make_cover_context(*t, 0.05);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto sites = random_on(*t, 30, seed);
    const auto r = run(t, tcover, sites);
    CHECK(r.mesh.triangle_keys() == brute_force_rdt(sites, *t).triangle_keys());
  }
}

TEST_CASE("two disjoint spheres") {
  const auto s = make_surface("two_spheres");
  const auto cover = make_cover_context(*s, 0.05);
  std::vector<Vec3> sites;
  for (const Vec3& p : fibonacci_sphere(120)) {
    sites.push_back(p + Vec3(-1.75, 0, 0));
    sites.push_back(p + Vec3(1.75, 0, 0));
  }
  const auto r = run(s, cover, sites);
  const auto t = validate(r.mesh, *s);
  CHECK(t.component_count == 2);
  CHECK(t.euler == 4);
  REQUIRE(t.components.size() == 2);
  for (const auto& c : t.components) CHECK(c.euler == 2);
  CHECK(t.homeomorphic());
}
