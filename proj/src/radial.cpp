#include "rdt/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rdt/constants.hpp"

namespace rdt {

Vec3 SiteFrame::direction(double theta) const { return std::cos(theta) * t1 + std::sin(theta) * t2; }

SiteFrame site_frame(const ImplicitSurface& surface, const Vec3& site) {
  SiteFrame f;
  f.v = site;
  f.n = surface.gradient(site).normalized();
  std::tie(f.t1, f.t2) = tangent_frame(f.n);
  return f;
}

namespace {

constexpr int kMaxSteps = 20000;
constexpr int kBisections = 80;
constexpr int kRefineDepth = 24;

// Voronoi cell of one site as the intersection of its neighbour halfspaces.
struct Cell {
  Vec3 v;
  std::vector<int> neighbors;
  std::vector<Vec3> points;

  Cell(const VoronoiComplex& vc, int site) : v(vc.sites()[static_cast<std::size_t>(site)]) {
    for (int f : vc.cells()[static_cast<std::size_t>(site)].faces) {
      const auto& face = vc.faces()[static_cast<std::size_t>(f)];
      const int w = face.u == site ? face.w : face.u;
      neighbors.push_back(w);
      points.push_back(vc.sites()[static_cast<std::size_t>(w)]);
    }
  }

  // Signed distance to the cell boundary (positive inside) and the closest neighbour.
  double margin(const Vec3& x, int* which = nullptr) const {
    double best = std::numeric_limits<double>::infinity();
    const double dv = (x - v).squaredNorm();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double m = ((x - points[i]).squaredNorm() - dv) / (2 * (points[i] - v).norm());
      if (m < best) {
        best = m;
        if (which) *which = neighbors[i];
      }
    }
    return best;
  }
};

struct SlicePlane {
  const ImplicitSurface& s;
  Vec3 m;  // plane normal n x u
  Vec3 v;
  double tol;

  Vec3 correct(Vec3 y) const {
    for (int k = 0; k < tol::newton_max_iterations; ++k) {
      const double f = s.value(y);
      if (std::abs(f) <= tol) break;
      Vec3 g = s.gradient(y);
      g -= g.dot(m) * m;
      const double g2 = g.squaredNorm();
      if (g2 == 0) break;
      y -= f / g2 * g;
      y -= (y - v).dot(m) * m;
    }
    return y;
  }

  Vec3 tangent(const Vec3& y, const Vec3& prev) const {
    Vec3 t = m.cross(s.gradient(y));
    const double n = t.norm();
    if (n == 0) return prev;
    t /= n;
    return t.dot(prev) < 0 ? Vec3(-t) : t;
  }
};

}  // namespace

RadialPath trace_radial_path(const RestrictedComplex& rc, int site, const ImplicitSurface& surface,
                             const LfsOracle& lfs, double theta) {
  const VoronoiComplex& vc = rc.voronoi();
  if (site < 0 || site >= static_cast<int>(vc.sites().size())) throw RestrictedError("site out of range");
  const Cell cell(vc, site);
  const SiteFrame fr = site_frame(surface, cell.v);
  const Vec3 u = fr.direction(theta);
  const SlicePlane plane{surface, fr.n.cross(u).normalized(), cell.v, 1e-6 * surface.on_surface_tolerance()};
  const double h0 = tol::trace_step_lfs * lfs(cell.v);
  const double floor = 1e-3 * h0;
  const double exact = 1e-12 * surface.bounding_box().diagonal();

  RadialPath p;
  p.site = site;
  p.theta = theta;
  p.points.push_back(cell.v);
  Vec3 x = cell.v;
  Vec3 t = u;
  double s = 0;
  for (int step = 0; step < kMaxSteps; ++step) {
    const double mx = cell.margin(x);
    const double h = std::min(h0, std::max(mx, floor));
    const Vec3 y = plane.correct(x + h * t);
    int w = -1;
    if (cell.margin(y, &w) > 0) {
      const double sy = (y - cell.v).dot(u);
      if (!(sy > s)) {
        p.monotone = false;
        p.failure = "projection not monotone";
        p.end = y;
        return p;
      }
      const Vec3 ty = plane.tangent(y, t);
      p.max_curvature = std::max(p.max_curvature, std::acos(std::clamp(t.dot(ty), -1.0, 1.0)) / (y - x).norm());
      x = y;
      t = ty;
      s = sy;
      p.points.push_back(x);
      continue;
    }
    // Exit inside this step: bisect the corrected predictor on the cell margin.
    double lo = 0, hi = h;
    for (int k = 0; k < kBisections && hi - lo > exact; ++k) {
      const double mid = 0.5 * (lo + hi);
      (cell.margin(plane.correct(x + mid * t)) > 0 ? lo : hi) = mid;
    }
    p.end = plane.correct(x + hi * t);
    cell.margin(p.end, &p.exit_neighbor);
    const double se = (p.end - cell.v).dot(u);
    if (!(se >= s - exact)) {
      p.monotone = false;
      p.failure = "projection not monotone";
      return p;
    }
    p.points.push_back(p.end);
    p.projected_length = (fr.v + se * u - cell.v).norm();
    p.reached_boundary = true;
    return p;
  }
  p.end = x;
  p.failure = "no boundary reached";
  return p;
}

namespace {

// Point of the path whose projected parameter is s, corrected onto the surface.
std::optional<Vec3> path_at(const RadialPath& p, const Vec3& u, const SlicePlane& plane, double s) {
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    const double a = (p.points[i - 1] - plane.v).dot(u);
    const double b = (p.points[i] - plane.v).dot(u);
    if (s >= a && s <= b) {
      const double c = b > a ? (s - a) / (b - a) : 0;
      Vec3 y = p.points[i - 1] + c * (p.points[i] - p.points[i - 1]);
      // Newton on the surface along the normal direction of the ray inside the plane.
      for (int k = 0; k < tol::newton_max_iterations; ++k) {
        y = plane.correct(y);
        const double e = (y - plane.v).dot(u) - s;
        if (std::abs(e) < 1e-13) break;
        const Vec3 t = plane.tangent(y, p.points[i] - p.points[i - 1]);
        const double tu = t.dot(u);
        if (std::abs(tu) < 1e-12) break;
        y -= e / tu * t;
      }
      return y;
    }
  }
  return std::nullopt;
}

}  // namespace

StarShapeResult star_shape_audit(const RestrictedComplex& rc, int site, const ImplicitSurface& surface,
                                 const LfsOracle& lfs, const CoverContext& cover, double dtheta) {
  if (!(dtheta > 0)) throw RestrictedError("angular step must be positive");
  StarShapeResult r;
  r.site = site;
  const auto& cell = rc.cells().at(static_cast<std::size_t>(site));
  r.ratio = cell.ratio();
  r.advisory = !(r.ratio < constants().xi);
  const VoronoiComplex& vc = rc.voronoi();
  const Vec3 v = vc.sites()[static_cast<std::size_t>(site)];
  const SiteFrame fr = site_frame(surface, v);
  const double scale = surface.bounding_box().diagonal();
  const double on_path = 1e-7 * scale;

  auto fail = [&](double theta, std::string what, const Vec3& x) {
    r.pass = false;
    r.failures.push_back({theta, std::move(what), x});
  };
  auto trace = [&](double theta) {
    RadialPath p = trace_radial_path(rc, site, surface, lfs, theta);
    if (!p.failure.empty()) fail(theta, p.failure, p.end);
    return p;
  };

  const int n = std::max(1, static_cast<int>(std::lround(2 * std::numbers::pi / dtheta)));
  const double step = 2 * std::numbers::pi / n;
  double lmax = 0, kmax = 0;
  for (int i = 0; i < n; ++i) {
    const double theta = i * step;
    const RadialPath p = trace(theta);
    r.thetas.push_back(theta);
    r.profile.push_back(p.projected_length);
    lmax = std::max(lmax, p.projected_length);
    kmax = std::max(kmax, p.max_curvature);
  }

  // Continuity: a grid jump above tolerance is bisected toward its steepest
  // half; a true discontinuity keeps its size down to the finest level.
  r.jump_tolerance = 2 * step * lmax * (1 + kmax * lmax);
  for (int i = 0; i < n; ++i) {
    const double j = std::abs(r.profile[static_cast<std::size_t>((i + 1) % n)] - r.profile[static_cast<std::size_t>(i)]);
    r.max_jump = std::max(r.max_jump, j);
    if (j <= r.jump_tolerance) continue;
    ++r.refinements;
    double a = i * step, b = (i + 1) * step;
    double la = r.profile[static_cast<std::size_t>(i)], lb = r.profile[static_cast<std::size_t>((i + 1) % n)];
    double jump = j;
    for (int d = 0; d < kRefineDepth && jump > r.jump_tolerance; ++d) {
      const double mid = 0.5 * (a + b);
      const double lm = trace(mid).projected_length;
      if (std::abs(lm - la) >= std::abs(lb - lm)) {
        b = mid;
        lb = lm;
      } else {
        a = mid;
        la = lm;
      }
      jump = std::abs(lb - la);
    }
    if (jump > r.jump_tolerance) fail(a, "l(theta) discontinuous", v);
  }

  // Uniqueness: every cover point of the cell lies on the radial path through it.
  for (int id : cell.cover_points) {
    const Vec3& x = cover.cover.points[static_cast<std::size_t>(id)];
    const Vec3 d = x - v;
    const double a = d.dot(fr.t1), b = d.dot(fr.t2);
    const double rho = std::hypot(a, b);
    if (rho < on_path) {
      if (d.norm() > on_path) fail(0, "cell point projects onto the site", x);
      continue;
    }
    ++r.cover_points_checked;
    const double theta = std::atan2(b, a);
    const RadialPath p = trace(theta);
    if (!p.failure.empty()) continue;
    const Vec3 u = fr.direction(theta);
    if (rho > p.projected_length + on_path) {
      fail(theta, "cell point beyond the radial path", x);
      continue;
    }
    const SlicePlane plane{surface, fr.n.cross(u).normalized(), v, 1e-6 * surface.on_surface_tolerance()};
    const auto y = path_at(p, u, plane, rho);
    if (!y || (*y - x).norm() > 1e-6 * scale) fail(theta, "cell point off its radial path", x);
  }
  return r;
}

}  // namespace rdt
