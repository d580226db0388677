#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rdt/constants.hpp"
#include "rdt/sampling.hpp"

using namespace rdt;

namespace {

const std::vector<Vec3> kOctahedron = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                                       Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};

struct Env {
  SurfacePtr surface;
  CoverContext cover;
  LfsOracle lfs;
};

const Env& env(const std::string& name, double h) {
  static std::map<std::pair<std::string, double>, Env> cache;
  auto it = cache.find({name, h});
  if (it == cache.end()) {
    Env e{make_surface(name), {}, {}};
    e.cover = make_cover_context(*e.surface, h);
    e.lfs = LfsOracle::for_surface(e.surface, e.cover.cover);
    it = cache.emplace(std::make_pair(name, h), std::move(e)).first;
  }
  return it->second;
}

}  // namespace

TEST_CASE("octahedron certificate") {
  const auto& e = env("sphere", 0.05);
  const double expected = std::sqrt(2 - 2 / std::sqrt(3.0));
  const auto c = verify_eps_sample(kOctahedron, *e.surface, e.lfs, e.cover.cover);
  CHECK(std::abs(c.epsilon - expected) < 1e-3);
  CHECK(c.epsilon <= expected + 1e-9);
  CHECK(c.epsilon_bound >= expected);
  CHECK(std::abs(std::abs(c.witness.x()) - 1 / std::sqrt(3.0)) < 1e-3);
  const auto raw = verify_eps_sample(kOctahedron, *e.surface, e.lfs, e.cover.cover, false);
  CHECK(raw.epsilon <= c.epsilon);

  const auto rc = restrict_to_surface(voronoi_of(kOctahedron, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
  const auto v = verify_eps_voronoi_sample(rc, *e.surface, e.lfs);
  CHECK(std::abs(v.epsilon - expected) < 1e-3);
  const auto six = six_sites_check(rc, *e.surface, e.lfs);
  CHECK(six.cells_per_component == std::vector<int>{6});
  CHECK_FALSE(six.xi_condition);  // 0.9194 is above xi
  CHECK_FALSE(six.contradiction);
}

TEST_CASE("trivial certificates") {
  const auto& e = env("sphere", 0.05);
  CHECK(verify_eps_sample(e.cover.cover.points, *e.surface, e.lfs, e.cover.cover, false).epsilon == 0);
  // Between cover points the distance is at most the cover radius.
  CHECK(verify_eps_sample(e.cover.cover.points, *e.surface, e.lfs, e.cover.cover).epsilon <= e.cover.cover.radius());
  const auto one = verify_eps_sample({Vec3(0, 0, 1)}, *e.surface, e.lfs, e.cover.cover);
  CHECK(std::abs(one.epsilon - 2) < 1e-3);
  CHECK_THROWS_AS(verify_eps_sample({}, *e.surface, e.lfs, e.cover.cover), SamplingError);
}

TEST_CASE("generate and verify round trip") {
  for (const std::string name : {"sphere", "torus", "ellipsoid", "two_spheres", "blended_spheres"}) {
    // The blend neck has lfs near 0.2 and needs a finer cover.
    const auto& e = env(name, name == "blended_spheres" ? 0.025 : 0.04);
    for (std::uint64_t seed : {1u, 2u}) {
      SampleSpec spec;
      spec.epsilon = 0.3;
      spec.seed = seed;
      const auto s = generate(*e.surface, e.lfs, e.cover, spec);
      INFO(name, " seed ", seed);
      CHECK(s.certificate.epsilon <= 0.3);
      const auto again = verify_eps_sample(s.sites, *e.surface, e.lfs, e.cover.cover);
      CHECK(again.epsilon <= 0.3);
      for (const Vec3& p : s.sites) CHECK(std::abs(e.surface->value(p)) < 1e-9);
      // Deterministic per seed.
      CHECK(generate(*e.surface, e.lfs, e.cover, spec).sites == s.sites);
    }
  }
}

TEST_CASE("coarse target still gives four sites") {
  const auto& e = env("sphere", 0.05);
  SampleSpec spec;
  spec.epsilon = 0.9;
  const auto s = generate(*e.surface, e.lfs, e.cover, spec);
  CHECK(s.sites.size() >= 4);
  CHECK(s.certificate.epsilon <= 0.9);
}

TEST_CASE("unreachable target") {
  const auto& e = env("sphere", 0.05);
  SampleSpec spec;
  spec.epsilon = 0.05;
  CHECK_THROWS_AS(generate(*e.surface, e.lfs, e.cover, spec), SamplingError);
  spec.epsilon = 1.5;
  CHECK_THROWS_AS(generate(*e.surface, e.lfs, e.cover, spec), SamplingError);
}

TEST_CASE("site count scales like 1/eps^2 on the torus") {
  const auto& e = env("torus", 0.02);
  SampleSpec coarse, fine;
  coarse.epsilon = 0.3;
  fine.epsilon = 0.15;
  const double n1 = static_cast<double>(generate(*e.surface, e.lfs, e.cover, coarse).sites.size());
  const double n2 = static_cast<double>(generate(*e.surface, e.lfs, e.cover, fine).sites.size());
  CHECK(n2 / n1 > 2.5);
  CHECK(n2 / n1 < 6);
}

TEST_CASE("voronoi mode and feature translation") {
  const auto& e = env("torus", 0.04);
  SampleSpec spec;
  spec.epsilon = 0.4;
  spec.mode = SampleMode::eps_voronoi_sample;
  const auto s = generate(*e.surface, e.lfs, e.cover, spec);
  const auto rc = restrict_to_surface(voronoi_of(s.sites, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
  CHECK(verify_eps_voronoi_sample(rc, *e.surface, e.lfs).epsilon <= 0.4 + 1e-9);
  // The generator and the complex certify from the same starts.
  for (std::uint64_t seed : {4, 18}) {
    SampleSpec v = spec;
    v.epsilon = 0.4132;
    v.seed = seed;
    const auto g = generate(*e.surface, e.lfs, e.cover, v);
    const auto grc = restrict_to_surface(voronoi_of(g.sites, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
    CHECK(verify_eps_voronoi_sample(grc, *e.surface, e.lfs).epsilon == doctest::Approx(g.certificate.epsilon).epsilon(1e-12));
  }

  // An eps-sample is an eps/(1-eps)-Voronoi sample.
  SampleSpec plain;
  plain.epsilon = 0.3;
  const auto p = generate(*e.surface, e.lfs, e.cover, plain);
  const auto prc = restrict_to_surface(voronoi_of(p.sites, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
  const double eps = verify_eps_sample(p.sites, *e.surface, e.lfs, e.cover.cover).epsilon;
  CHECK(verify_eps_voronoi_sample(prc, *e.surface, e.lfs).epsilon <= eps / (1 - eps) + 1e-9);
  const auto six = six_sites_check(prc, *e.surface, e.lfs);
  CHECK(six.xi_condition);
  CHECK_FALSE(six.contradiction);
  CHECK(six.cells_per_component[0] >= 6);
}

TEST_CASE("refining the cover does not raise the bound") {
  const auto& coarse = env("sphere", 0.05);
  const auto& fine = env("sphere", 0.025);
  SampleSpec spec;
  spec.epsilon = 0.3;
  const auto s = generate(*coarse.surface, coarse.lfs, coarse.cover, spec);
  const auto a = verify_eps_sample(s.sites, *coarse.surface, coarse.lfs, coarse.cover.cover);
  const auto b = verify_eps_sample(s.sites, *fine.surface, fine.lfs, fine.cover.cover);
  CHECK(b.epsilon_bound <= a.epsilon_bound);
  // The bound covers the refined supremum.
  CHECK(b.epsilon <= a.epsilon_bound);
  CHECK(std::abs(a.epsilon - b.epsilon) < 1e-3);
}

TEST_CASE("two spheres per component") {
  const auto& e = env("two_spheres", 0.05);
  std::vector<Vec3> sites = kOctahedron;
  for (Vec3& p : sites) p += Vec3(1.75, 0, 0);
  sites.push_back(Vec3(-1.75, 0, 1));
  const auto rc = restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
  const auto six = six_sites_check(rc, *e.surface, e.lfs);
  CHECK(six.sites_per_component == std::vector<int>{1, 6});
  CHECK_FALSE(six.xi_condition);
}

TEST_CASE("two sites on the sphere") {
  const auto& e = env("sphere", 0.05);
  const auto rc =
      restrict_to_surface(voronoi_of({Vec3(0, 0, 1), Vec3(0, 0, -1)}, voronoi_clip_box(*e.surface)), *e.surface, e.lfs, e.cover);
  const auto six = six_sites_check(rc, *e.surface, e.lfs);
  CHECK(six.cells_per_component == std::vector<int>{2});
  CHECK_FALSE(six.xi_condition);
  CHECK_FALSE(six.contradiction);
}
