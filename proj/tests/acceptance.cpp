#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "rdt/constants.hpp"
#include "rdt/pipeline.hpp"

using namespace rdt;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kDeg = std::numbers::pi / 180;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(Clock::now() - t).count();
  o.require(s < budget_seconds, "runtime " + std::to_string(s) + " s over budget");
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %8.2f s / %5.0f s  %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), s, budget_seconds,
              o.detail.str().c_str());
  std::fflush(stdout);
}

const std::vector<std::string> kSurfaces{"sphere", "torus", "two_spheres"};

const SurfaceContext& context(const std::string& surface) {
  static std::map<std::string, SurfaceContext> cache;
  auto it = cache.find(surface);
  if (it == cache.end()) {
    RunConfig c;
    c.surface = surface;
    it = cache.emplace(surface, make_context(c)).first;
  }
  return it->second;
}

void check_run(Outcome& o, const std::string& tag, const PipelineResult& r) {
  o.require(r.properties.all_pass(), tag + " properties A-F");
  o.require(r.topology.manifold, tag + " manifold");
  o.require(r.topology.euler_match, tag + " euler " + std::to_string(r.topology.euler));
  o.require(r.topology.component_match, tag + " components " + std::to_string(r.topology.component_count));
  for (const auto& c : r.topology.components)
    o.require(c.euler == c.expected_euler, tag + " component euler");
  o.require(r.topology.homeomorphic(), tag + " homeomorphism surrogate");
}

// Runs the end-to-end suite and returns the concatenated reports.
std::string end_to_end(Outcome& o, SampleMode mode, double epsilon) {
  std::string reports;
  for (const auto& name : kSurfaces) {
    const auto& ctx = context(name);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      RunConfig c;
      c.surface = name;
      c.mode = mode;
      c.epsilon = epsilon;
      c.seed = seed;
      const std::string tag = name + "/" + std::to_string(seed);
      const SiteSet s = sample(ctx, c);
      o.require(s.certificate.epsilon <= epsilon, tag + " certificate");
      const PipelineResult r = reconstruct(ctx, c, s.sites, s.certificate);
      check_run(o, tag, r);
      if (mode == SampleMode::eps_voronoi_sample)
        o.require(verify_eps_voronoi_sample(r.rc, *ctx.surface, ctx.lfs).epsilon <= epsilon, tag + " recertified");
      reports += dump(run_report(c, r));
    }
  }
  return reports;
}

std::vector<Vec3> random_on(const ImplicitSurface& s, int n, std::mt19937_64& rng) {
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

}  // namespace

int main() {
  criterion(1, "constants", 1, [](Outcome& o) {
    const Constants& k = constants();
    o.require(k.xi > 0.786150 && k.xi < 0.786152, "xi " + std::to_string(k.xi));
    o.require(k.kappa > 0.495682 && k.kappa < 0.495684, "kappa " + std::to_string(k.kappa));
    const double xr = std::abs(std::pow(k.xi, 4) + k.xi * k.xi - 1);
    const double s3 = std::sqrt(3.0);
    const double kr = std::abs(std::pow(k.kappa, 4) - 4 * (1 - k.kappa * k.kappa) * std::pow(1 - s3 * k.kappa, 2));
    o.require(xr < 1e-14, "xi residual");
    o.require(kr < 1e-12, "kappa residual");
    o.detail << "xi=" << k.xi << " kappa=" << k.kappa;
  });

  criterion(2, "formula anchors", 1, [](Outcome& o) {
    const double a = eta(0.3245) / kDeg, b = eta(0.4132) / kDeg;
    o.require(a < 19.21 && a > 19.21 - 0.01, "eta(0.3245) = " + std::to_string(a));
    o.require(b < 25.008 && b > 25.008 - 0.01, "eta(0.4132) = " + std::to_string(b));
    const double t = triangle_normal_bound(0.4132, 49.023 * kDeg);
    o.require(t < 0.906231, "triangle bound " + std::to_string(t));
    o.detail << "eta=" << a << "," << b << " deg bound=" << t;
  });

  criterion(3, "octahedron fixture", 10, [](Outcome& o) {
    const std::vector<Vec3> sites{Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                                  Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};
    const auto& ctx = context("sphere");
    const PipelineResult r = reconstruct(ctx, RunConfig{}, sites);
    o.require(r.mesh.triangles().size() == 8 && r.mesh.faces.size() == 8, "triangles");
    o.require(r.mesh.edges.size() == 12, "edges");
    o.require(r.topology.manifold && r.topology.euler == 2, "manifold with euler 2");
    const auto c = verify_eps_sample(sites, *ctx.surface, ctx.lfs, ctx.cover.cover);
    o.require(std::abs(c.epsilon - 0.9194) <= 1e-3, "epsilon " + std::to_string(c.epsilon));
    // Farthest point from the axis sites is an octant centre.
    const double closed = std::sqrt(2 - 2 / std::sqrt(3.0));
    o.require(std::abs(c.epsilon - closed) < 1e-6, "closed form");
    o.detail << "eps*=" << c.epsilon;
  });

  std::string reports;
  criterion(4, "eps-sample pipeline 0.3245", 300, [&](Outcome& o) {
    reports = end_to_end(o, SampleMode::eps_sample, constants().eps_sample);
    o.detail << kSurfaces.size() * 20 << " runs";
  });

  criterion(5, "eps-Voronoi pipeline 0.4132", 300, [](Outcome& o) {
    end_to_end(o, SampleMode::eps_voronoi_sample, constants().eps_voronoi);
    o.detail << kSurfaces.size() * 20 << " runs";
  });

  criterion(6, "star-shaped cells 0.44", 300, [](Outcome& o) {
    int cells = 0, failed = 0;
    for (const auto& name : kSurfaces) {
      const auto& ctx = context(name);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RunConfig c;
        c.surface = name;
        c.epsilon = 0.44;
        c.seed = seed;
        c.star_shape = true;
        c.dtheta_degrees = 1;
        const SiteSet s = sample(ctx, c);
        o.require(s.certificate.epsilon <= 0.44, name + " certificate");
        const PipelineResult r = reconstruct(ctx, c, s.sites, s.certificate);
        for (const auto& a : r.star_shape) {
          ++cells;
          if (!a.pass) {
            ++failed;
            o.require(false, name + "/" + std::to_string(seed) + " cell " + std::to_string(a.site) + ": " +
                                 a.failures.front().what);
          }
        }
      }
    }
    o.detail << cells << " cells, " << failed << " failures";
  });

  criterion(7, "lemma audits", 120, [](Outcome& o) {
    int trials = 0;
    for (const auto& name : catalog_names()) {
      RunConfig c;
      c.surface = name;
      c.trials = 10000;
      c.lemmas = {"abovebelow", "raybisector", "normal_variation", "triangle_normal", "feature_translation"};
      for (const auto& a : run_audits(context(name), c)) {
        o.require(a.trials >= 10000, name + " " + a.audit + " trials");
        o.require(a.counterexamples == 0 && a.pass(), name + " " + a.audit + " counterexamples");
        trials += a.trials;
      }
    }
    o.detail << trials << " trials";
  });

  criterion(8, "brute-force oracle", 120, [](Outcome& o) {
    int sets = 0;
    for (const std::string name : {"sphere", "torus"}) {
      const auto& ctx = context(name);
      std::mt19937_64 rng(name.size());
      std::uniform_int_distribution<int> size(4, 30);
      for (int k = 0; k < 25; ++k) {
        const auto sites = random_on(*ctx.surface, size(rng), rng);
        const PipelineResult r = reconstruct(ctx, RunConfig{}, sites);
        o.require(r.mesh.triangle_keys() == brute_force_rdt(sites, *ctx.surface).triangle_keys(),
                  name + " set " + std::to_string(k));
        ++sets;
      }
    }
    o.detail << sets << " site sets";
  });

  criterion(9, "plane curves 0.3245", 30, [](Outcome& o) {
    int runs = 0;
    for (const std::string name : {"circle", "ellipse", "flower"})
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RunConfig c;
        c.curve = name;
        c.epsilon = constants().eps_sample;
        c.seed = seed;
        const CurveResult r = run_curve(c);
        const std::string tag = name + "/" + std::to_string(seed);
        o.require(r.sample.certificate.epsilon <= c.epsilon, tag + " certificate");
        o.require(r.polygon.valid() && r.polygon.cycles == r.polygon.expected_components, tag + " polygon");
        ++runs;
      }
    o.detail << runs << " runs";
  });

  criterion(10, "deterministic reports", 300, [&](Outcome& o) {
    Outcome again;
    const std::string second = end_to_end(again, SampleMode::eps_sample, constants().eps_sample);
    o.require(!reports.empty() && second == reports, "reports differ");
    o.detail << reports.size() << " bytes identical";
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
