#include "rdt/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <limits>
#include <numbers>
#include <random>

#include "rdt/constants.hpp"

namespace rdt {

const char* to_string(SampleMode m) { return m == SampleMode::eps_sample ? "eps-sample" : "eps-voronoi-sample"; }

SampleMode parse_sample_mode(const std::string& s) {
  if (s == "eps-sample") return SampleMode::eps_sample;
  if (s == "eps-voronoi-sample") return SampleMode::eps_voronoi_sample;
  throw SamplingError("unknown sample mode '" + s + "' (eps-sample, eps-voronoi-sample)");
}

namespace {

constexpr int kRefineStarts = 16;

using Nearest = std::function<int(const Vec3&, double*)>;

// d(x, V) / lfs(x), or d(x, V) / lfs(v) for the nearest site v in Voronoi mode.
struct Ratio {
  Nearest nearest;
  const std::vector<Vec3>& sites;
  const LfsOracle& lfs;
  bool voronoi;

  double operator()(const Vec3& x, int* site) const {
    double d = 0;
    const int v = nearest(x, &d);
    if (site) *site = v;
    return d / (voronoi ? lfs(sites[static_cast<std::size_t>(v)]) : lfs(x));
  }
};

struct Ascent {
  Vec3 x;
  double value;
  int site;
};

// Pattern search on the surface: eight tangent directions, halving the step.
Ascent ascend(const ImplicitSurface& surface, const Ratio& f, Vec3 x, double step) {
  int site = -1;
  double best = f(x, &site);
  const double stop = 1e-10 * surface.bounding_box().diagonal();
  while (step > stop) {
    const auto [t1, t2] = tangent_frame(Vec3(surface.gradient(x).normalized()));
    bool moved = false;
    for (int k = 0; k < 8 && !moved; ++k) {
      const double a = k * std::numbers::pi / 4;
      Vec3 y;
      try {
        y = closest_point(surface, x + step * (std::cos(a) * t1 + std::sin(a) * t2)).point.x;
      } catch (const SurfaceError&) {
        continue;
      }
      int sy = -1;
      const double v = f(y, &sy);
      if (v > best) {
        best = v;
        x = y;
        site = sy;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {x, best, site};
}

// cover_lfs: lfs at the cover points when already known. Refined maxima above
// `report` are appended to `above`.
SampleCertificate certify(const std::vector<Vec3>& sites, const ImplicitSurface& surface, const LfsOracle& lfs,
                          const SurfaceCover& cover, bool voronoi, bool refine,
                          const std::vector<double>* cover_lfs = nullptr, double report = 0,
                          std::vector<Vec3>* above = nullptr) {
  if (sites.empty()) throw SamplingError("empty site set");
  const auto tree = std::make_shared<KdTree>(sites);
  const Ratio f{[tree](const Vec3& x, double* d) { return tree->nearest(x, d); }, sites, lfs, voronoi};
  SampleCertificate c;
  c.mode = voronoi ? SampleMode::eps_voronoi_sample : SampleMode::eps_sample;
  c.cover_spacing = cover.spacing;
  c.cover_points = static_cast<int>(cover.points.size());
  c.site_count = static_cast<int>(sites.size());
  const double r = cover.radius();
  std::vector<double> site_lfs;
  if (voronoi)
    for (const Vec3& v : sites) site_lfs.push_back(lfs(v));
  // Best cover point per site; ascents start from the best sites.
  std::vector<std::pair<double, int>> best(sites.size(), {0.0, -1});
  for (std::size_t i = 0; i < cover.points.size(); ++i) {
    const Vec3& x = cover.points[i];
    double d = 0;
    const int v = tree->nearest(x, &d);
    const double fl = voronoi ? site_lfs[static_cast<std::size_t>(v)] : cover_lfs ? (*cover_lfs)[i] : lfs(x);
    const double q = d / fl;
    auto& b = best[static_cast<std::size_t>(v)];
    if (b.second < 0 || -q < b.first) b = {-q, static_cast<int>(i)};
    if (q > c.epsilon) {
      c.epsilon = q;
      c.witness = x;
      c.witness_site = v;
    }
    const double low = voronoi ? fl : fl - r;
    c.epsilon_bound = std::max(c.epsilon_bound, low > 0 ? (d + r) / low : std::numeric_limits<double>::infinity());
  }
  std::vector<std::pair<double, int>> ranked;
  for (const auto& b : best)
    if (b.second >= 0) ranked.push_back(b);
  if (refine) {
    c.refined = true;
    const std::size_t k = std::min<std::size_t>(kRefineStarts, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (std::size_t i = 0; i < k; ++i) {
      const auto a = ascend(surface, f, cover.points[static_cast<std::size_t>(ranked[i].second)], cover.spacing);
      if (a.value > c.epsilon) {
        c.epsilon = a.value;
        c.witness = a.x;
        c.witness_site = a.site;
      }
      if (above && a.value > report &&
          std::none_of(above->begin(), above->end(), [&](const Vec3& y) { return (y - a.x).norm() < cover.spacing; }))
        above->push_back(a.x);
    }
  }
  return c;
}

}  // namespace

SiteSet generate(const ImplicitSurface& surface, const LfsOracle& lfs, const CoverContext& cover,
                 const SampleSpec& spec) {
  if (!(spec.epsilon > 0 && spec.epsilon < 1)) throw SamplingError("epsilon must lie in (0, 1)");
  const auto& pts = cover.cover.points;
  const std::size_t n = pts.size();
  if (n == 0) throw SamplingError("empty cover");
  const double target = spec.epsilon * spec.safety;
  const bool voronoi = spec.mode == SampleMode::eps_voronoi_sample;

  std::vector<double> f(n);
  double fmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = lfs(pts[i]);
    fmin = std::min(fmin, f[i]);
  }
  if (target * fmin <= cover.cover.radius())
    throw SamplingError("target epsilon " + std::to_string(spec.epsilon) + " is unreachable at cover spacing " +
                        std::to_string(cover.cover.spacing) + "; use a cover spacing below " +
                        std::to_string(target * fmin / cover.cover.constant));

  std::vector<Vec3> sites;
  std::vector<double> site_lfs;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> owner(n, -1);
  auto insert = [&](const Vec3& p, double fp) {
    const int id = static_cast<int>(sites.size());
    sites.push_back(p);
    site_lfs.push_back(fp);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (pts[j] - p).norm();
      if (d < dist[j]) {
        dist[j] = d;
        owner[j] = id;
      }
    }
  };

  std::size_t first = 0;
  if (spec.initial == InitialSite::random) {
    std::mt19937_64 rng(spec.seed);
    first = static_cast<std::size_t>(rng() % n);
  }
  insert(pts[first], f[first]);
  while (true) {
    std::size_t best = 0;
    double br = -1;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = dist[j] / (voronoi ? site_lfs[static_cast<std::size_t>(owner[j])] : f[j]);
      if (r > br) {
        br = r;
        best = j;
      }
    }
    if (br <= target && static_cast<int>(sites.size()) >= spec.min_sites) break;
    if (br <= 0) throw SamplingError("cover exhausted before reaching the target");
    insert(pts[best], f[best]);
  }

  SiteSet out;
  out.spec = spec;
  for (int round = 0;; ++round) {
    std::vector<Vec3> above;
    out.certificate = certify(sites, surface, lfs, cover.cover, voronoi, true, &f, spec.epsilon, &above);
    if (out.certificate.epsilon <= spec.epsilon) break;
    if (round >= 100) throw SamplingError("refined certificate does not reach the target; use a finer cover");
    for (const Vec3& x : above) insert(x, lfs(x));
  }
  out.sites = std::move(sites);
  return out;
}

SampleCertificate verify_eps_sample(const std::vector<Vec3>& sites, const ImplicitSurface& surface,
                                    const LfsOracle& lfs, const SurfaceCover& cover, bool refine) {
  return certify(sites, surface, lfs, cover, false, refine);
}

SampleCertificate verify_eps_voronoi_sample(const RestrictedComplex& rc, const ImplicitSurface& surface,
                                            const LfsOracle& lfs, bool refine) {
  const VoronoiComplex& vc = rc.voronoi();
  if (vc.sites().empty()) throw SamplingError("an eps-Voronoi sample needs at least one site");
  SampleCertificate c;
  c.mode = SampleMode::eps_voronoi_sample;
  c.cover_spacing = rc.cover_spacing();
  c.site_count = static_cast<int>(vc.sites().size());
  const double r = tol::cover_constant * rc.cover_spacing();
  std::vector<std::pair<double, int>> ranked;
  for (const auto& cell : rc.cells()) {
    c.cover_points += static_cast<int>(cell.cover_points.size());
    if (cell.cover_points.empty()) continue;
    ranked.emplace_back(-cell.ratio(), cell.site);
    if (cell.ratio() > c.epsilon) {
      c.epsilon = cell.ratio();
      c.witness = cell.farthest;
      c.witness_site = cell.site;
    }
    c.epsilon_bound = std::max(c.epsilon_bound, (cell.max_distance + r) / cell.lfs);
  }
  if (refine) {
    c.refined = true;
    const Ratio f{[&vc](const Vec3& x, double* d) { return vc.nearest_site(x, d); }, vc.sites(), lfs, true};
    const std::size_t k = std::min<std::size_t>(kRefineStarts, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (std::size_t i = 0; i < k; ++i) {
      const auto& cell = rc.cells()[static_cast<std::size_t>(ranked[i].second)];
      const auto a = ascend(surface, f, cell.farthest, rc.cover_spacing());
      if (a.value > c.epsilon) {
        c.epsilon = a.value;
        c.witness = a.x;
        c.witness_site = a.site;
      }
    }
  }
  return c;
}

SixSitesReport six_sites_check(const RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs) {
  SixSitesReport r;
  const int nc = surface.component_count();
  r.cells_per_component.assign(static_cast<std::size_t>(nc), 0);
  r.sites_per_component.assign(static_cast<std::size_t>(nc), 0);
  const auto& sites = rc.voronoi().sites();
  for (const Vec3& s : sites) ++r.sites_per_component[static_cast<std::size_t>(surface.component_of(s))];
  for (const auto& cell : rc.cells())
    if (!cell.empty())
      ++r.cells_per_component[static_cast<std::size_t>(surface.component_of(sites[static_cast<std::size_t>(cell.site)]))];
  r.voronoi_ratio =
      sites.empty() ? std::numeric_limits<double>::infinity() : verify_eps_voronoi_sample(rc, surface, lfs).epsilon;
  r.xi_condition = r.voronoi_ratio < constants().xi;
  if (r.xi_condition)
    for (int k : r.cells_per_component)
      if (k < 6) r.contradiction = true;
  return r;
}

}  // namespace rdt
