#include "rdt/restricted.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>
#include <map>
#include <numeric>

namespace rdt {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "?";
}

CoverContext make_cover_context(const ImplicitSurface& surface, double h) {
  CoverContext c;
  c.cover = dense_cover(surface, h);
  c.component.reserve(c.cover.points.size());
  for (const Vec3& p : c.cover.points) c.component.push_back(surface.component_of(p));
  c.grid = std::make_shared<PointGrid>(c.cover.points, c.flood_radius());
  return c;
}

// ---------------------------------------------------------------------------
// Roots along segments

SegmentRoots segment_roots(const ImplicitSurface& surface, const Vec3& a, const Vec3& b, std::optional<double> value_a,
                           std::optional<double> value_b) {
  SegmentRoots out;
  const double len = (b - a).norm();
  if (!(len > 0)) return out;
  const Vec3 d = (b - a) / len;
  const double tol = surface.on_surface_tolerance();
  const double K = surface.hessian_bound();
  const double cert_len = 1 / K;
  const double leaf = 1e-8 * surface.bounding_box().diagonal();

  auto S = [&](double t) { return surface.value(a + t * d); };
  auto G = [&](double t) { return surface.gradient(a + t * d).dot(d); };
  auto bisect = [&](double t0, double t1, double s0) {
    for (int it = 0; it < 200; ++it) {
      const double tm = 0.5 * (t0 + t1);
      const double sm = S(tm);
      if (std::abs(sm) <= 1e-3 * tol || t1 - t0 <= 1e-15 * len) return tm;
      if ((sm < 0) == (s0 < 0)) {
        t0 = tm;
        s0 = sm;
      } else {
        t1 = tm;
      }
    }
    return 0.5 * (t0 + t1);
  };

  struct Interval {
    double t0, t1, s0, s1;
  };
  std::vector<Interval> stack{{0.0, len, value_a ? *value_a : S(0.0), value_b ? *value_b : S(len)}};
  std::vector<double> roots;
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const double L = iv.t1 - iv.t0;
    // 1-Lipschitz: no zero here. The slack covers overridden endpoint values.
    if (std::abs(iv.s0) + std::abs(iv.s1) > L + 2 * tol) continue;
    const bool change = (iv.s0 < 0) != (iv.s1 < 0);
    if (L <= cert_len && 0.5 * (std::abs(iv.s0) + std::abs(iv.s1) + L) <= cert_len) {
      const double g0 = G(iv.t0), g1 = G(iv.t1);
      if ((g0 > 0) == (g1 > 0) && std::abs(g0) + std::abs(g1) > K * L) {
        if (change) roots.push_back(bisect(iv.t0, iv.t1, iv.s0));
        continue;
      }
    }
    if (L <= leaf) {
      if (change) {
        roots.push_back(bisect(iv.t0, iv.t1, iv.s0));
      } else if (std::min(std::abs(iv.s0), std::abs(iv.s1)) <= std::max(tol, L)) {
        out.grazing = true;
        out.grazing_point = a + iv.t0 * d;
      }
      continue;
    }
    double tm = 0.5 * (iv.t0 + iv.t1);
    double sm = S(tm);
    if (sm == 0) {
      tm += 1e-3 * L;
      sm = S(tm);
    }
    // Right half first so the left half is processed first.
    stack.push_back({tm, iv.t1, sm, iv.s1});
    stack.push_back({iv.t0, tm, iv.s0, sm});
  }
  std::sort(roots.begin(), roots.end());
  for (double t : roots) out.roots.push_back(a + t * d);
  return out;
}

void restricted_vertices(RestrictedComplex& rc, const ImplicitSurface& surface) {
  const VoronoiComplex& vc = rc.voronoi_;
  const double tol = surface.on_surface_tolerance();
  const double same = 1e-12 * vc.box().diagonal();
  rc.vertices_.clear();
  rc.vertices_on_surface_.clear();
  rc.vertex_field_.assign(vc.vertices().size(), 0);
  for (std::size_t i = 0; i < vc.vertices().size(); ++i) {
    const double s = surface.value(vc.vertices()[i].position);
    if (std::abs(s) <= tol) {
      // Treated as strictly inside.
      rc.vertices_on_surface_.push_back(static_cast<int>(i));
      rc.vertex_field_[i] = -tol;
    } else {
      rc.vertex_field_[i] = s;
    }
  }
  rc.edge_roots_.assign(vc.edges().size(), {});
  for (std::size_t e = 0; e < vc.edges().size(); ++e) {
    const VoronoiEdge& E = vc.edges()[e];
    if (!E.in_box) continue;
    std::optional<double> va, vb;
    if (E.v0 >= 0 && (E.a - vc.vertices()[static_cast<std::size_t>(E.v0)].position).norm() <= same)
      va = rc.vertex_field_[static_cast<std::size_t>(E.v0)];
    if (E.v1 >= 0 && (E.b - vc.vertices()[static_cast<std::size_t>(E.v1)].position).norm() <= same)
      vb = rc.vertex_field_[static_cast<std::size_t>(E.v1)];
    const SegmentRoots sr = segment_roots(surface, E.a, E.b, va, vb);
    EdgeRoots& er = rc.edge_roots_[e];
    er.grazing = sr.grazing;
    er.grazing_point = sr.grazing_point;
    for (const Vec3& x : sr.roots) {
      RestrictedVertex rv;
      rv.position = x;
      rv.edge = static_cast<int>(e);
      rv.sites = E.sites;
      rv.tangency_margin = std::abs(surface.gradient(x).normalized().dot(E.direction));
      rv.near_voronoi_vertex = (va && (x - E.a).norm() <= 10 * tol) || (vb && (x - E.b).norm() <= 10 * tol);
      er.vertices.push_back(static_cast<int>(rc.vertices_.size()));
      rc.vertices_.push_back(std::move(rv));
    }
  }
}

// ---------------------------------------------------------------------------
// Face tracing

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double t = l2 > 0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

struct FaceFrame {
  Vec3 o, nu, t1, t2;
  std::vector<Vec2> poly;  // counter-clockwise

  FaceFrame(const VoronoiFace& F) : nu(F.bisector.normal) {
    o = Vec3::Zero();
    for (const Vec3& p : F.polygon) o += p;
    o /= static_cast<double>(F.polygon.size());
    o = project_to_plane(o, F.bisector);
    std::tie(t1, t2) = tangent_frame(nu);
    double extent = 0;
    for (const Vec3& p : F.polygon) extent = std::max(extent, (p - o).norm());
    // Sides too short to orient come from clustered vertices; their lines cut the face.
    for (const Vec3& p : F.polygon) {
      const Vec2 q = to2(p);
      if (poly.empty() || (q - poly.back()).norm() > 1e-9 * extent) poly.push_back(q);
    }
    while (poly.size() > 1 && (poly.front() - poly.back()).norm() <= 1e-9 * extent) poly.pop_back();
    double area = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % poly.size()];
      area += p.x() * q.y() - p.y() * q.x();
    }
    if (area < 0) std::reverse(poly.begin(), poly.end());
  }

  Vec2 to2(const Vec3& x) const {
    const Vec3 d = x - o;
    return {d.dot(t1), d.dot(t2)};
  }
  Vec3 lift(const Vec2& v) const { return v.x() * t1 + v.y() * t2; }

  // Signed distance to the boundary: positive inside. Also the nearest side.
  double boundary_distance(const Vec3& x, int* side = nullptr) const {
    const Vec2 p = to2(x);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 e = poly[(i + 1) % poly.size()] - poly[i];
      const Vec2 r = p - poly[i];
      const double dist = (e.x() * r.y() - e.y() * r.x()) / e.norm();
      if (dist < best) {
        best = dist;
        if (side) *side = static_cast<int>(i);
      }
    }
    return best;
  }

  Vec3 inward_normal(int side) const {
    const Vec2 e = (poly[(static_cast<std::size_t>(side) + 1) % poly.size()] - poly[static_cast<std::size_t>(side)]).normalized();
    return lift(Vec2(-e.y(), e.x()));
  }
};

class Tracer {
 public:
  Tracer(const ImplicitSurface& s, const LfsOracle& lfs, const FaceFrame& frame, int face)
      : s_(s), lfs_(lfs), fr_(frame), face_(face), tol_(s.on_surface_tolerance()),
        scale_(s.bounding_box().diagonal()) {}

  std::optional<Vec3> correct(Vec3 x) const {
    x -= fr_.nu * fr_.nu.dot(x - fr_.o);
    for (int it = 0; it < 50; ++it) {
      const double v = s_.value(x);
      if (std::abs(v) <= 1e-3 * tol_) return x;
      const Vec3 g = s_.gradient(x);
      const Vec3 gp = g - fr_.nu * fr_.nu.dot(g);
      const double g2 = gp.squaredNorm();
      if (!(g2 > 1e-24)) return std::nullopt;
      x -= (v / g2) * gp;
    }
    if (std::abs(s_.value(x)) <= tol_) return x;
    return std::nullopt;
  }

  Vec3 tangent(const Vec3& x, const Vec3& prev) const {
    Vec3 t = fr_.nu.cross(s_.gradient(x));
    const double n = t.norm();
    if (!(n > 0)) throw RestrictedError("face " + std::to_string(face_) + ": surface tangent to the bisector plane");
    t /= n;
    return t.dot(prev) < 0 ? -t : t;
  }

  double margin(const Vec3& x) const {
    const Vec3 g = s_.gradient(x);
    return fr_.nu.cross(g).norm() / g.norm();
  }

  struct Result {
    std::vector<Vec3> points;
    bool exited = false;
    bool closed = false;
    double length = 0;
    double min_margin = 1;
  };

  // March from x0 along dir0. In loop mode, stop when back at x0.
  Result march(const Vec3& x0, const Vec3& dir0, bool loop_mode) const {
    Result r;
    r.points.push_back(x0);
    r.min_margin = margin(x0);
    Vec3 x = x0;
    Vec3 prev = dir0;
    const double h_start = tol::trace_step_lfs * lfs_(x0);
    for (int step = 0; step < 200000; ++step) {
      const Vec3 tau = tangent(x, prev);
      const double hmax = tol::trace_step_lfs * lfs_(x);
      double h = std::min(hmax, std::max(fr_.boundary_distance(x) / 4, 0.005 * hmax));
      std::optional<Vec3> y;
      while (true) {
        y = correct(x + h * tau);
        if (y && (*y - x).norm() < 2 * h && tangent(*y, tau).dot(tau) > 0.5) break;
        h *= 0.5;
        if (h < 1e-12 * scale_)
          throw RestrictedError("face " + std::to_string(face_) + ": tracer step size underflow");
      }
      if (fr_.boundary_distance(*y) < 0) {
        double lo = 0, hi = h;
        Vec3 z = *y;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (lo + hi);
          const auto c = correct(x + m * tau);
          if (c && fr_.boundary_distance(*c) >= 0) {
            lo = m;
          } else {
            hi = m;
            if (c) z = *c;
          }
        }
        r.length += (z - x).norm();
        r.points.push_back(z);
        r.exited = true;
        return r;
      }
      if (loop_mode && r.length > 3 * h_start) {
        const Vec3 step_vec = *y - x;
        const double along = (x0 - x).dot(step_vec);
        if (along > 0 && along <= step_vec.squaredNorm() && point_segment_distance(x0, x, *y) < 0.1 * h) {
          r.length += (x0 - x).norm();
          r.points.push_back(x0);
          r.closed = true;
          return r;
        }
      }
      r.length += (*y - x).norm();
      r.points.push_back(*y);
      r.min_margin = std::min(r.min_margin, margin(*y));
      prev = tau;
      x = *y;
    }
    throw RestrictedError("face " + std::to_string(face_) + ": trace did not terminate");
  }

 private:
  const ImplicitSurface& s_;
  const LfsOracle& lfs_;
  const FaceFrame& fr_;
  int face_;
  double tol_, scale_;
};

double polyline_distance(const Vec3& p, const std::vector<Vec3>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  if (line.size() == 1) best = (p - line[0]).norm();
  return best;
}

}  // namespace

void trace_restricted_edges(RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs) {
  const VoronoiComplex& vc = rc.voronoi_;
  const double scale = surface.bounding_box().diagonal();
  const double match_tol = 1e-6 * scale;
  rc.edges_.clear();
  rc.faces_.assign(vc.faces().size(), {});

  for (std::size_t f = 0; f < vc.faces().size(); ++f) {
    const VoronoiFace& F = vc.faces()[f];
    if (F.polygon.size() < 3) continue;
    std::vector<int> roots;
    for (int e : F.edges)
      for (int v : rc.edge_roots_[static_cast<std::size_t>(e)].vertices) roots.push_back(v);

    // Quick rejection by the polygon's bounding ball.
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : F.polygon) c += p;
    c /= static_cast<double>(F.polygon.size());
    double radius = 0;
    for (const Vec3& p : F.polygon) radius = std::max(radius, (p - c).norm());
    if (roots.empty() && std::abs(surface.value(c)) > radius) continue;

    const FaceFrame frame(F);
    const Tracer tracer(surface, lfs, frame, static_cast<int>(f));
    std::map<int, bool> used;
    for (int v : roots) used[v] = false;
    FaceTrace& ft = rc.faces_[f];

    auto match = [&](const Vec3& x) {
      int best = -1;
      double bd = std::numeric_limits<double>::infinity();
      for (int v : roots) {
        if (used[v]) continue;
        const double d = (rc.vertices_[static_cast<std::size_t>(v)].position - x).norm();
        if (d < bd) {
          bd = d;
          best = v;
        }
      }
      if (best >= 0 && bd <= match_tol) {
        used[best] = true;
        return best;
      }
      ++ft.unmatched_exits;
      return -1;
    };
    auto add_edge = [&](RestrictedEdge e) {
      e.face = static_cast<int>(f);
      ft.edges.push_back(static_cast<int>(rc.edges_.size()));
      rc.edges_.push_back(std::move(e));
    };

    for (int v : roots) {
      if (used[v]) continue;
      used[v] = true;
      const Vec3 x0 = rc.vertices_[static_cast<std::size_t>(v)].position;
      int side = 0;
      frame.boundary_distance(x0, &side);
      const Vec3 inward = frame.inward_normal(side);
      const Vec3 dir = tracer.tangent(x0, inward);
      const auto r = tracer.march(x0, dir, false);
      RestrictedEdge e;
      e.polyline = r.points;
      e.start = v;
      e.end = match(r.points.back());
      e.length = r.length;
      e.min_margin = r.min_margin;
      add_edge(std::move(e));
    }

    // Interior seed scan for pieces not reached from the boundary.
    const int n = tol::face_seed_grid;
    Vec2 lo = frame.poly[0], hi = frame.poly[0];
    for (const Vec2& p : frame.poly) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 step = (hi - lo) / n;
    std::vector<double> val(static_cast<std::size_t>((n + 1) * (n + 1)), std::numeric_limits<double>::quiet_NaN());
    auto node = [&](int i, int j) -> Vec3 { return frame.o + frame.lift(lo + Vec2(i * step.x(), j * step.y())); };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const Vec3 x = node(i, j);
        if (frame.boundary_distance(x) >= 0) val[static_cast<std::size_t>(i * (n + 1) + j)] = surface.value(x);
      }
    std::vector<Vec3> seeds;
    auto probe = [&](int i0, int j0, int i1, int j1) {
      const double a = val[static_cast<std::size_t>(i0 * (n + 1) + j0)], b = val[static_cast<std::size_t>(i1 * (n + 1) + j1)];
      if (std::isnan(a) || std::isnan(b) || (a < 0) == (b < 0)) return;
      Vec3 p = node(i0, j0), q = node(i1, j1);
      double sp = a;
      for (int it = 0; it < 60; ++it) {
        const Vec3 m = 0.5 * (p + q);
        const double sm = surface.value(m);
        if ((sm < 0) == (sp < 0)) {
          p = m;
          sp = sm;
        } else {
          q = m;
        }
      }
      seeds.push_back(0.5 * (p + q));
    };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        if (i < n) probe(i, j, i + 1, j);
        if (j < n) probe(i, j, i, j + 1);
      }
    for (const Vec3& s0 : seeds) {
      const auto s = tracer.correct(s0);
      if (!s) continue;
      const double near = 1e-3 * lfs(*s) + 1e-9 * scale;
      bool known = false;
      for (int e : ft.edges)
        if (polyline_distance(*s, rc.edges_[static_cast<std::size_t>(e)].polyline) < near) {
          known = true;
          break;
        }
      if (known || frame.boundary_distance(*s) < 0) continue;
      const Vec3 dir = tracer.tangent(*s, frame.t1);
      auto fwd = tracer.march(*s, dir, true);
      RestrictedEdge e;
      e.from_seed = true;
      if (fwd.closed) {
        e.polyline = std::move(fwd.points);
        e.closed = true;
        e.length = fwd.length;
        e.min_margin = fwd.min_margin;
      } else {
        auto back = tracer.march(*s, -dir, false);
        std::reverse(back.points.begin(), back.points.end());
        e.polyline = back.points;
        e.polyline.insert(e.polyline.end(), fwd.points.begin() + 1, fwd.points.end());
        e.start = match(e.polyline.front());
        e.end = match(e.polyline.back());
        e.length = fwd.length + back.length;
        e.min_margin = std::min(fwd.min_margin, back.min_margin);
      }
      add_edge(std::move(e));
    }
  }
}

// ---------------------------------------------------------------------------
// Cells

void assemble_cells(RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs,
                    const CoverContext& cover) {
  const VoronoiComplex& vc = rc.voronoi_;
  const auto& sites = vc.sites();
  const std::size_t ns = sites.size();
  const auto& pts = cover.cover.points;
  const double tol = surface.on_surface_tolerance();
  rc.cover_spacing_ = cover.cover.spacing;
  rc.cells_.assign(ns, {});
  for (std::size_t v = 0; v < ns; ++v) {
    rc.cells_[v].site = static_cast<int>(v);
    rc.cells_[v].lfs = lfs(sites[v]);
  }

  // Nearest-site assignment of the cover.
  std::vector<int> owner(pts.size());
  rc.ambiguous_cover_points_ = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = 0;
    const int v = vc.nearest_site(pts[i], &d);
    owner[i] = v;
    auto& cell = rc.cells_[static_cast<std::size_t>(v)];
    cell.cover_points.push_back(static_cast<int>(i));
    if (d > cell.max_distance) {
      cell.max_distance = d;
      cell.farthest = pts[i];
    }
    for (int f : vc.cells()[static_cast<std::size_t>(v)].faces) {
      const auto& F = vc.faces()[static_cast<std::size_t>(f)];
      const int w = F.u == v ? F.w : F.u;
      if ((pts[i] - sites[static_cast<std::size_t>(w)]).norm() - d <= tol) {
        ++rc.ambiguous_cover_points_;
        break;
      }
    }
  }

  // Boundary loops from the traced edges.
  for (std::size_t f = 0; f < vc.faces().size(); ++f) {
    const auto& F = vc.faces()[f];
    for (int e : rc.faces_[f].edges) {
      rc.cells_[static_cast<std::size_t>(F.u)].edges.push_back(e);
      rc.cells_[static_cast<std::size_t>(F.w)].edges.push_back(e);
    }
  }
  for (auto& cell : rc.cells_) {
    std::map<int, int> degree;
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int closed = 0;
    for (int e : cell.edges) {
      const auto& E = rc.edges_[static_cast<std::size_t>(e)];
      if (E.closed) {
        ++closed;
        continue;
      }
      for (int x : {E.start, E.end}) {
        ++degree[x];
        if (!parent.count(x)) parent[x] = x;
      }
      parent[find(E.start)] = find(E.end);
    }
    int comps = 0;
    cell.boundary_closed = true;
    for (const auto& [x, d] : degree) {
      if (x < 0 || d != 2) cell.boundary_closed = false;
      if (find(x) == x) ++comps;
    }
    cell.boundary_loops = comps + closed;
  }

  // Connectivity of each cell by flooding its cover points.
  std::vector<int> comp(pts.size(), -1);
  const double rho = cover.flood_radius();
  for (auto& cell : rc.cells_) {
    const int v = cell.site;
    std::vector<int> roots;
    for (int start : cell.cover_points) {
      if (comp[static_cast<std::size_t>(start)] >= 0) continue;
      const int id = static_cast<int>(roots.size());
      roots.push_back(start);
      std::vector<int> queue{start};
      comp[static_cast<std::size_t>(start)] = id;
      for (std::size_t k = 0; k < queue.size(); ++k) {
        cover.grid->for_each_within(pts[static_cast<std::size_t>(queue[k])], rho, [&](int j, double) {
          if (owner[static_cast<std::size_t>(j)] != v || comp[static_cast<std::size_t>(j)] >= 0) return;
          comp[static_cast<std::size_t>(j)] = id;
          queue.push_back(j);
        });
      }
    }
    cell.components = static_cast<int>(roots.size());
    if (cell.components <= 1) continue;

    // Rescue: a component joins the one at the site when a walk on the
    // surface from the site reaches it without leaving the cell.
    const Vec3& site = sites[static_cast<std::size_t>(v)];
    int home = -1;
    double hd = std::numeric_limits<double>::infinity();
    for (int i : cell.cover_points)
      if ((pts[static_cast<std::size_t>(i)] - site).norm() < hd) {
        hd = (pts[static_cast<std::size_t>(i)] - site).norm();
        home = comp[static_cast<std::size_t>(i)];
      }
    int joined = 0;
    for (int id = 0; id < static_cast<int>(roots.size()); ++id) {
      if (id == home) continue;
      const Vec3& target = pts[static_cast<std::size_t>(roots[static_cast<std::size_t>(id)])];
      const int steps = static_cast<int>(std::ceil((target - site).norm() / (0.5 * cover.cover.spacing))) + 1;
      bool ok = true;
      for (int k = 1; k < steps && ok; ++k) {
        try {
          const Vec3 x = closest_point(surface, site + (target - site) * (static_cast<double>(k) / steps)).point.x;
          double d = 0;
          const int w = vc.nearest_site(x, &d);
          ok = w == v || (x - site).norm() - d <= tol;
        } catch (const SurfaceError&) {
          ok = false;
        }
      }
      if (ok) ++joined;
    }
    cell.components -= joined;
  }

  // Euler bookkeeping per surface component.
  const int nc = surface.component_count();
  std::vector<int> C(static_cast<std::size_t>(nc), 0), E(static_cast<std::size_t>(nc), 0), V(static_cast<std::size_t>(nc), 0);
  for (const auto& cell : rc.cells_) {
    std::vector<char> touches(static_cast<std::size_t>(nc), 0);
    for (int i : cell.cover_points) touches[static_cast<std::size_t>(cover.component[static_cast<std::size_t>(i)])] = 1;
    if (cell.cover_points.empty() && !cell.edges.empty())
      touches[static_cast<std::size_t>(surface.component_of(sites[static_cast<std::size_t>(cell.site)]))] = 1;
    for (int c = 0; c < nc; ++c) C[static_cast<std::size_t>(c)] += touches[static_cast<std::size_t>(c)];
  }
  for (const auto& e : rc.edges_)
    if (!e.closed) ++E[static_cast<std::size_t>(surface.component_of(e.polyline[e.polyline.size() / 2]))];
  for (const auto& v : rc.vertices_) ++V[static_cast<std::size_t>(surface.component_of(v.position))];
  rc.handles_.assign(static_cast<std::size_t>(nc), 0);
  for (int c = 0; c < nc; ++c) {
    const int defect = C[static_cast<std::size_t>(c)] - E[static_cast<std::size_t>(c)] + V[static_cast<std::size_t>(c)] -
                       surface.reference_euler(c);
    // Odd defects cannot come from handles; report them as a half-integer sentinel.
    rc.handles_[static_cast<std::size_t>(c)] = defect % 2 == 0 ? defect / 2 : std::numeric_limits<int>::max();
  }
}

RestrictedComplex restrict_to_surface(const VoronoiComplex& voronoi, const ImplicitSurface& surface,
                                      const LfsOracle& lfs, const CoverContext& cover) {
  require_clip_box(voronoi.box(), surface);
  RestrictedComplex rc;
  rc.voronoi_ = voronoi;
  restricted_vertices(rc, surface);
  trace_restricted_edges(rc, surface, lfs);
  assemble_cells(rc, surface, lfs, cover);
  return rc;
}

// ---------------------------------------------------------------------------
// Properties

PropertyReport check_properties(const RestrictedComplex& rc, const ImplicitSurface& surface) {
  PropertyReport r;
  const VoronoiComplex& vc = rc.voronoi();
  auto witness = [&](const char* prop, std::string what, int id, const Vec3& p, double value) {
    r.witnesses.push_back({prop, std::move(what), id, p, value});
  };

  for (const auto& cell : rc.cells()) {
    if (cell.empty()) continue;
    ++r.nonempty_cells;
    const Vec3& site = vc.sites()[static_cast<std::size_t>(cell.site)];
    if (cell.components > 1) {
      r.A = false;
      witness("A", "cell is disconnected", cell.site, site, cell.components);
    }
    if (cell.boundary_loops != 1) {
      r.A = false;
      witness("A", "cell has " + std::to_string(cell.boundary_loops) + " boundary loops", cell.site, site,
              cell.boundary_loops);
    }
    if (!cell.boundary_closed) {
      r.A = false;
      witness("A", "cell boundary does not close", cell.site, site, 0);
    }
  }
  for (std::size_t c = 0; c < rc.handle_count().size(); ++c)
    if (rc.handle_count()[c] != 0) {
      r.A = false;
      witness("A", "Euler count of component implies handles or inconsistency", static_cast<int>(c), Vec3::Zero(),
              rc.handle_count()[c]);
    }

  for (std::size_t f = 0; f < rc.faces().size(); ++f) {
    const auto& ft = rc.faces()[f];
    if (ft.edges.empty()) continue;
    ++r.nonempty_faces;
    const auto& e0 = rc.edges()[static_cast<std::size_t>(ft.edges[0])];
    if (ft.edges.size() != 1) {
      r.B = false;
      witness("B", "face meets the surface in " + std::to_string(ft.edges.size()) + " components",
              static_cast<int>(f), e0.polyline.front(), static_cast<double>(ft.edges.size()));
    } else if (e0.closed) {
      r.B = false;
      witness("B", "face meets the surface in a closed loop", static_cast<int>(f), e0.polyline.front(), e0.length);
    } else if (e0.start < 0 || e0.end < 0 || e0.start == e0.end) {
      r.B = false;
      witness("B", "arc endpoints not matched to restricted vertices", static_cast<int>(f), e0.polyline.back(), 0);
    }
    if (ft.unmatched_exits > 0) {
      r.B = false;
      witness("B", "tracer exits without a matching restricted vertex", static_cast<int>(f), e0.polyline.back(),
              ft.unmatched_exits);
    }
    for (int e : ft.edges) r.min_face_margin = std::min(r.min_face_margin, rc.edges()[static_cast<std::size_t>(e)].min_margin);
  }

  bool grazing = false;
  for (std::size_t e = 0; e < rc.edge_roots().size(); ++e) {
    const auto& er = rc.edge_roots()[e];
    if (er.vertices.size() > 1) {
      r.C = false;
      witness("C", "edge meets the surface " + std::to_string(er.vertices.size()) + " times", static_cast<int>(e),
              rc.vertices()[static_cast<std::size_t>(er.vertices[0])].position, static_cast<double>(er.vertices.size()));
    }
    if (er.grazing) {
      grazing = true;
      witness("F", "edge grazes the surface", static_cast<int>(e), er.grazing_point, 0);
    }
  }
  for (const auto& v : rc.vertices()) r.min_edge_margin = std::min(r.min_edge_margin, v.tangency_margin);
  r.restricted_vertex_count = static_cast<int>(rc.vertices().size());

  r.symbolic_vertices = static_cast<int>(rc.vertices_on_surface().size());
  for (int v : rc.vertices_on_surface())
    witness("D", "Voronoi vertex on the surface, treated as inside", v,
            vc.vertices()[static_cast<std::size_t>(v)].position,
            surface.value(vc.vertices()[static_cast<std::size_t>(v)].position));

  if (r.min_face_margin <= tol::tangency_margin) {
    r.E = Verdict::indeterminate;
    witness("E", "near-tangent face intersection", -1, Vec3::Zero(), r.min_face_margin);
  }
  if (r.min_edge_margin <= tol::tangency_margin || grazing) {
    r.F = Verdict::indeterminate;
    if (!grazing) witness("F", "near-tangent edge intersection", -1, Vec3::Zero(), r.min_edge_margin);
  }
  return r;
}

}  // namespace rdt
