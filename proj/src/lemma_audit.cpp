#include "rdt/lemma_audit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rdt/constants.hpp"

namespace rdt {

double eta(double delta) {
  if (!(delta >= 0 && delta < constants().eta_domain))
    throw AuditError("eta is defined for 0 <= delta < " + std::to_string(constants().eta_domain));
  return std::acos(1 - delta * delta / (2 * std::sqrt(1 - delta * delta)));
}

double triangle_normal_bound(double r_over_lfs, double phi) {
  if (!(phi > 0 && phi < std::numbers::pi)) throw AuditError("plane angle must lie in (0, pi)");
  if (!(r_over_lfs >= 0)) throw AuditError("r / lfs must be non-negative");
  return r_over_lfs * std::max(1 / std::tan(phi / 2), 1.0);
}

FeatureFactors feature_translation(double epsilon) {
  if (!(epsilon >= 0 && epsilon < 1)) throw AuditError("feature translation needs 0 <= eps < 1");
  return {1 / (1 - epsilon), epsilon / (1 - epsilon)};
}

namespace {

using Rng = std::mt19937_64;

Rng trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  return Rng(seq);
}

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0, 1)(rng); }

SurfacePoint at(const ImplicitSurface& s, const Vec3& x) { return {x, s.gradient(x).normalized()}; }

SurfacePoint random_point(const ImplicitSurface& s, Rng& rng) {
  const Box3 b = s.bounding_box();
  while (true) {
    const Vec3 p = b.lo + (b.hi - b.lo).cwiseProduct(Vec3(uniform(rng), uniform(rng), uniform(rng)));
    try {
      return at(s, closest_point(s, p).point.x);
    } catch (const SurfaceError&) {
    }
  }
}

// Tangent-plane jitter of length up to `radius`, projected back to the surface.
std::optional<SurfacePoint> near_point(const ImplicitSurface& s, const SurfacePoint& v, double radius, Rng& rng) {
  const auto [t1, t2] = tangent_frame(v.n);
  const double a = 2 * std::numbers::pi * uniform(rng);
  const double r = radius * std::sqrt(uniform(rng));
  try {
    return at(s, closest_point(s, v.x + r * (std::cos(a) * t1 + std::sin(a) * t2)).point.x);
  } catch (const SurfaceError&) {
    return std::nullopt;
  }
}

struct Recorder {
  AuditResult& r;
  const AuditConfig& c;

  void check(int trial, double margin, const char* what, const Vec3& p, const Vec3& q) {
    ++r.trials;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin >= -c.tolerance) {
      ++r.passed;
      return;
    }
    ++r.counterexamples;
    if (static_cast<int>(r.witnesses.size()) < c.max_witnesses) r.witnesses.push_back({trial, what, p, q, margin});
  }
};

AuditResult start(const char* name, const ImplicitSurface& s) {
  AuditResult r;
  r.audit = name;
  r.surface = s.name();
  return r;
}

// Seeded trial loop: `body` returns false when the precondition is not met.
template <class F>
void run_trials(AuditResult& r, const AuditConfig& c, F body) {
  const int cap = 50 * std::max(c.trials, 1);
  for (int k = 0; r.trials < c.trials && k < cap; ++k) {
    Rng rng = trial_rng(c.seed, k);
    if (!body(k, rng)) ++r.skipped;
  }
}

// Signed distances of o, o' to T_x, oriented so the margin is positive when they are strictly opposite.
double opposite_margin(const Vec3& o, const Vec3& o2, const SurfacePoint& x, double scale) {
  const double a = (o - x.x).dot(x.n) / scale;
  const double b = (o2 - x.x).dot(x.n) / scale;
  return a * b < 0 ? std::min(std::abs(a), std::abs(b)) : -std::min(std::abs(a), std::abs(b)) - 1e-300;
}

}  // namespace

AuditResult audit_abovebelow(const ImplicitSurface& surface, const LfsOracle& lfs, const AuditConfig& config) {
  AuditResult r = start("abovebelow", surface);
  Recorder rec{r, config};
  const double xi = constants().xi;
  run_trials(r, config, [&](int k, Rng& rng) {
    const SurfacePoint v = random_point(surface, rng);
    const double f = lfs.conservative(v.x);
    const auto x = near_point(surface, v, xi * f, rng);
    if (!x || !((x->x - v.x).norm() < xi * f)) return false;
    rec.check(k, opposite_margin(v.x + f * v.n, v.x - f * v.n, *x, f), "o and o' not strictly opposite", v.x, x->x);
    return true;
  });
  return r;
}

AuditResult audit_raybisector(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                              const AuditConfig& config) {
  AuditResult r = start("raybisector", surface);
  Recorder rec{r, config};
  const double xi = constants().xi;
  const auto& vc = rc.voronoi();
  std::vector<int> traced;
  for (std::size_t e = 0; e < rc.edges().size(); ++e)
    if (rc.edges()[e].polyline.size() >= 2) traced.push_back(static_cast<int>(e));
  if (traced.empty()) return r;
  run_trials(r, config, [&](int k, Rng& rng) {
    const auto& edge = rc.edges()[static_cast<std::size_t>(traced[rng() % traced.size()])];
    const auto& face = vc.faces()[static_cast<std::size_t>(edge.face)];
    const bool flip = rng() & 1;
    const Vec3 v = vc.sites()[static_cast<std::size_t>(flip ? face.w : face.u)];
    const Vec3 w = vc.sites()[static_cast<std::size_t>(flip ? face.u : face.w)];
    // Random point along the polyline, corrected onto the surface inside the bisector.
    const std::size_t i = rng() % (edge.polyline.size() - 1);
    Vec3 y = edge.polyline[i] + uniform(rng) * (edge.polyline[i + 1] - edge.polyline[i]);
    const Vec3 m = (w - v).normalized();
    const Vec3 mid = 0.5 * (v + w);
    for (int it = 0; it < tol::newton_max_iterations; ++it) {
      y -= (y - mid).dot(m) * m;
      const double s = surface.value(y);
      if (std::abs(s) < 1e-3 * surface.on_surface_tolerance()) break;
      Vec3 g = surface.gradient(y);
      g -= g.dot(m) * m;
      if (g.squaredNorm() == 0) break;
      y -= s / g.squaredNorm() * g;
    }
    const SurfacePoint x = at(surface, y);
    const SurfacePoint sv = at(surface, v);
    const double f = lfs.conservative(v);
    if (!((x.x - v).norm() < xi * f)) return false;
    const Vec3 o = v + f * sv.n, o2 = v - f * sv.n;
    const double a = (o - x.x).dot(x.n), b = (o2 - x.x).dot(x.n);
    if (!(a * b < 0)) {
      rec.check(k, -1, "T_x does not cross oo'", v, x.x);
      return true;
    }
    const Vec3 t = o + a / (a - b) * (o2 - o);
    const Vec3 dir = t - x.x;
    if (dir.norm() == 0) {
      rec.check(k, -1, "t coincides with x", v, x.x);
      return true;
    }
    rec.check(k, dir.normalized().dot((v - w).normalized()), "ray leaves v's side of the bisector", v, x.x);
    return true;
  });
  return r;
}

AuditResult audit_normal_variation(const ImplicitSurface& surface, const LfsOracle& lfs, const AuditConfig& config) {
  AuditResult r = start("normal_variation", surface);
  Recorder rec{r, config};
  const double domain = constants().eta_domain;
  run_trials(r, config, [&](int k, Rng& rng) {
    const SurfacePoint p = random_point(surface, rng);
    const double f = lfs.conservative(p.x);
    const auto q = near_point(surface, p, domain * f, rng);
    if (!q) return false;
    const double delta = (q->x - p.x).norm() / f;
    if (!(delta < domain)) return false;
    const double angle = std::acos(std::clamp(p.n.dot(q->n), -1.0, 1.0));
    rec.check(k, eta(delta) - angle, "normal angle exceeds eta", p.x, q->x);
    return true;
  });
  return r;
}

AuditResult audit_triangle_normal(const ImplicitSurface& surface, const LfsOracle& lfs, const AuditConfig& config) {
  AuditResult r = start("triangle_normal", surface);
  Recorder rec{r, config};
  const double scale = surface.bounding_box().diagonal();
  run_trials(r, config, [&](int k, Rng& rng) {
    const SurfacePoint v = random_point(surface, rng);
    const double f = lfs.conservative(v.x);
    const double reach = 0.5 * f * uniform(rng);
    const auto a = near_point(surface, v, reach, rng);
    const auto b = near_point(surface, v, reach, rng);
    if (!a || !b) return false;
    const Vec3 e1 = a->x - v.x, e2 = b->x - v.x, e3 = b->x - a->x;
    const Vec3 cr = e1.cross(e2);
    const double area = 0.5 * cr.norm();
    // Near-collinear triangles have no well-defined normal.
    if (area < 1e-10 * scale * scale || area < 1e-6 * e1.norm() * e2.norm()) return false;
    const double radius = e1.norm() * e2.norm() * e3.norm() / (4 * area);
    const double phi = std::acos(std::clamp(e1.normalized().dot(e2.normalized()), -1.0, 1.0));
    const double sine = cr.normalized().cross(v.n).norm();
    rec.check(k, triangle_normal_bound(radius / f, phi) - sine, "triangle normal exceeds bound", a->x, b->x);
    return true;
  });
  return r;
}

AuditResult audit_feature_translation(const ImplicitSurface& surface, const LfsOracle& lfs,
                                      const AuditConfig& config) {
  AuditResult r = start("feature_translation", surface);
  Recorder rec{r, config};
  run_trials(r, config, [&](int k, Rng& rng) {
    const SurfacePoint p = random_point(surface, rng);
    const double lo = lfs.conservative(p.x);
    const auto q = near_point(surface, p, 0.95 * lo, rng);
    if (!q) return false;
    const double dist = (q->x - p.x).norm();
    const double eps = dist / lo;
    if (!(eps < 1)) return false;
    // Upper estimate at q keeps a declared-error oracle from raising false alarms.
    const double hi = lfs(q->x) + lfs.error_bound();
    const FeatureFactors ff = feature_translation(eps);
    rec.check(k, std::min(ff.lfs_factor * hi - lo, ff.distance_factor * hi - dist) / lo, "feature translation violated",
              p.x, q->x);
    return true;
  });
  return r;
}

AuditResult audit_vertex_uniqueness(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                                    const AuditConfig& config) {
  AuditResult r = start("vertex_uniqueness", surface);
  Recorder rec{r, config};
  const double kappa = constants().kappa;
  const auto& vc = rc.voronoi();
  for (std::size_t e = 0; e < vc.edges().size(); ++e) {
    const auto& edge = vc.edges()[e];
    if (edge.sites.size() != 3) {
      ++r.skipped;
      continue;
    }
    // v is the vertex at the largest plane angle, opposite the longest side.
    int vi = 0;
    double longest = -1;
    for (int i = 0; i < 3; ++i) {
      const Vec3& p = vc.sites()[static_cast<std::size_t>(edge.sites[static_cast<std::size_t>((i + 1) % 3)])];
      const Vec3& q = vc.sites()[static_cast<std::size_t>(edge.sites[static_cast<std::size_t>((i + 2) % 3)])];
      if ((p - q).norm() > longest) {
        longest = (p - q).norm();
        vi = i;
      }
    }
    const Vec3 v = vc.sites()[static_cast<std::size_t>(edge.sites[static_cast<std::size_t>(vi)])];
    const double bound = kappa * lfs.conservative(v);
    const auto& roots = rc.edge_roots()[e];
    bool condition = true;
    for (int id : roots.vertices)
      if (!((rc.vertices()[static_cast<std::size_t>(id)].position - v).norm() < bound)) condition = false;
    if (roots.grazing && (roots.grazing_point - v).norm() >= bound) condition = false;
    if (!condition) {
      ++r.skipped;
      continue;
    }
    const int k = static_cast<int>(e);
    if (roots.vertices.size() > 1) {
      rec.check(k, -static_cast<double>(roots.vertices.size() - 1), "more than one restricted vertex", v,
                rc.vertices()[static_cast<std::size_t>(roots.vertices[1])].position);
    } else if (roots.grazing) {
      rec.check(k, -1, "tangential contact (indeterminate)", v, roots.grazing_point);
    } else if (roots.vertices.size() == 1) {
      const auto& rv = rc.vertices()[static_cast<std::size_t>(roots.vertices[0])];
      rec.check(k, rv.tangency_margin - tol::tangency_margin, "line tangent to the surface", v, rv.position);
    } else {
      rec.check(k, 1, "", v, v);
    }
  }
  return r;
}

AuditResult audit_edge_structure(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                                 const AuditConfig& config) {
  AuditResult r = start("edge_structure", surface);
  Recorder rec{r, config};
  const auto& vc = rc.voronoi();
  const auto& sites = vc.sites();
  std::vector<int> per_component(static_cast<std::size_t>(surface.component_count()), 0);
  for (const Vec3& s : sites) ++per_component[static_cast<std::size_t>(surface.component_of(s))];
  const double eps_sample = constants().eps_sample, eps_voronoi = constants().eps_voronoi;

  for (std::size_t f = 0; f < vc.faces().size(); ++f) {
    const auto& face = vc.faces()[f];
    const auto& trace = rc.faces()[f];
    std::vector<int> verts;
    for (int e : face.edges)
      for (int id : rc.edge_roots()[static_cast<std::size_t>(e)].vertices) verts.push_back(id);
    if (trace.edges.empty() && verts.empty()) continue;
    const Vec3 u = sites[static_cast<std::size_t>(face.u)];
    const Vec3 w = sites[static_cast<std::size_t>(face.w)];
    if (per_component[static_cast<std::size_t>(surface.component_of(u))] < 3 ||
        per_component[static_cast<std::size_t>(surface.component_of(w))] < 3) {
      ++r.skipped;
      continue;
    }
    bool condition = true;
    for (int id : verts) {
      const auto& rv = rc.vertices()[static_cast<std::size_t>(id)];
      const double lu = lfs.conservative(rv.position);
      bool by_sample = true, by_voronoi = true;
      for (int s : rv.sites) {
        const Vec3& p = sites[static_cast<std::size_t>(s)];
        const double d = (p - rv.position).norm();
        by_sample = by_sample && d <= eps_sample * lu;
        by_voronoi = by_voronoi && d <= eps_voronoi * lfs.conservative(p);
      }
      condition = condition && (by_sample || by_voronoi);
    }
    if (!condition) {
      ++r.skipped;
      continue;
    }
    const int k = static_cast<int>(f);
    if (trace.edges.size() != 1 || rc.edges()[static_cast<std::size_t>(trace.edges[0])].closed) {
      rec.check(k, -1, "face intersection is not a single interval", u, w);
      continue;
    }
    if (verts.size() != 2) {
      rec.check(k, -1, "face boundary does not carry exactly two restricted vertices", u, w);
      continue;
    }
    // Split the polygon into two chains monotone in n_u; at most one vertex per chain.
    const auto& poly = face.polygon;
    const std::size_t n = poly.size();
    const Vec3 nu = surface.gradient(u).normalized();
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (poly[i].dot(nu) < poly[lo].dot(nu)) lo = i;
      if (poly[i].dot(nu) > poly[hi].dot(nu)) hi = i;
    }
    auto side_of = [&](const Vec3& x) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 a = poly[i], b = poly[(i + 1) % n];
        const double t = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        const double d = (a + t * (b - a) - x).norm();
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      return best;
    };
    auto forward_chain = [&](std::size_t side) { return (side + n - lo) % n < (hi + n - lo) % n; };
    const bool c0 = forward_chain(side_of(rc.vertices()[static_cast<std::size_t>(verts[0])].position));
    const bool c1 = forward_chain(side_of(rc.vertices()[static_cast<std::size_t>(verts[1])].position));
    rec.check(k, c0 != c1 ? 1 : -1, "two restricted vertices on one monotone chain", u, w);
  }
  return r;
}

AuditResult audit_projection_injectivity(const ImplicitSurface& surface, const LfsOracle& lfs,
                                         const CoverContext& cover, const AuditConfig& config) {
  AuditResult r = start("projection_injectivity", surface);
  Recorder rec{r, config};
  const double factor = config.radius_factor > 0 ? config.radius_factor : constants().kappa;
  const double h = cover.cover.spacing;
  const auto& pts = cover.cover.points;
  run_trials(r, config, [&](int k, Rng& rng) {
    const SurfacePoint v = random_point(surface, rng);
    const double radius = factor * lfs.conservative(v.x);
    std::vector<int> inside;
    std::vector<Vec3> normals;
    double max_cos_lo = 1;
    // Random direction within 30 degrees of n_v.
    const auto [t1, t2] = tangent_frame(v.n);
    const double tilt = (std::numbers::pi / 6) * uniform(rng), spin = 2 * std::numbers::pi * uniform(rng);
    Vec3 d = config.force_normal_direction
                 ? v.n
                 : Vec3(std::cos(tilt) * v.n + std::sin(tilt) * (std::cos(spin) * t1 + std::sin(spin) * t2));
    bool admissible = true;
    cover.grid->for_each_within(v.x, radius + 2 * h, [&](int id, double d2) {
      const Vec3 n = surface.gradient(pts[static_cast<std::size_t>(id)]).normalized();
      const double c = n.dot(d);
      if (!(c > 0)) admissible = false;
      max_cos_lo = std::min(max_cos_lo, std::abs(c));
      if (d2 <= radius * radius) inside.push_back(id);
    });
    if (!admissible && !config.force_normal_direction) return false;
    if (inside.size() < 2) return false;
    const double slope = std::min(10.0, std::sqrt(std::max(0.0, 1 - max_cos_lo * max_cos_lo)) / std::max(max_cos_lo, 1e-12));
    // Near-duplicate images far apart along the projection direction are a fold.
    std::vector<Vec3> image;
    image.reserve(inside.size());
    for (int id : inside) {
      const Vec3& x = pts[static_cast<std::size_t>(id)];
      image.push_back(x - x.dot(d) * d);
    }
    const PointGrid grid(image, h);
    double margin = 1;
    Vec3 wp = v.x, wq = v.x;
    for (std::size_t i = 0; i < inside.size(); ++i) {
      const Vec3& x = pts[static_cast<std::size_t>(inside[i])];
      grid.for_each_within(image[i], 0.5 * h, [&](int j, double d2) {
        const Vec3& y = pts[static_cast<std::size_t>(inside[static_cast<std::size_t>(j)])];
        const double dz = std::abs((x - y).dot(d));
        const double m = (2 * h + std::sqrt(d2) * slope - dz) / h;
        if (m < margin) {
          margin = m;
          wp = x;
          wq = y;
        }
      });
    }
    rec.check(k, margin, "projection folds", wp, wq);
    return true;
  });
  return r;
}

}  // namespace rdt
