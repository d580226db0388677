#include "rdt/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "rdt/predicates.hpp"
#include "rdt/surfaces.hpp"

namespace rdt {

void clip_polygon(std::vector<Vec3>& polygon, const Vec3& n, double c) {
  if (polygon.empty()) return;
  std::vector<Vec3> out;
  out.reserve(polygon.size() + 1);
  const std::size_t m = polygon.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3& p = polygon[i];
    const Vec3& q = polygon[(i + 1) % m];
    const double dp = n.dot(p) - c, dq = n.dot(q) - c;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) out.push_back(p + (dp / (dp - dq)) * (q - p));
  }
  polygon = std::move(out);
}

std::vector<Vec3> plane_box_polygon(const Plane3d& plane, const Box3& box) {
  const auto [t1, t2] = tangent_frame(plane.normal);
  const Vec3 c = project_to_plane(box.center(), plane);
  const double r = box.diagonal() + (c - box.center()).norm();
  std::vector<Vec3> poly = {c + r * (-t1 - t2), c + r * (t1 - t2), c + r * (t1 + t2), c + r * (-t1 + t2)};
  for (int a = 0; a < 3; ++a) {
    clip_polygon(poly, Vec3::Unit(a), box.hi[a]);
    clip_polygon(poly, -Vec3::Unit(a), -box.lo[a]);
  }
  return poly;
}

namespace {

double polygon_area(const std::vector<Vec3>& p) {
  Vec3 s = Vec3::Zero();
  for (std::size_t i = 1; i + 1 < p.size(); ++i) s += (p[i] - p[0]).cross(p[i + 1] - p[0]);
  return 0.5 * s.norm();
}

std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

double far_parameter(const Vec3& origin, const Box3& box) { return (origin - box.center()).norm() + 2 * box.diagonal(); }

Vec3 bisector_halfspace(const Vec3& u, const Vec3& m, double* c) {
  *c = 0.5 * (m.squaredNorm() - u.squaredNorm());
  return m - u;
}

std::vector<Vec3> clipped_face_polygon(const std::vector<Vec3>& sites, int u, int w, const std::vector<int>& others,
                                       const Box3& box) {
  const Vec3& pu = sites[static_cast<std::size_t>(u)];
  const Vec3& pw = sites[static_cast<std::size_t>(w)];
  std::vector<Vec3> poly = plane_box_polygon(Plane3d(0.5 * (pu + pw), pw - pu), box);
  for (int m : others) {
    if (m == u || m == w) continue;
    double c = 0;
    const Vec3 n = bisector_halfspace(pu, sites[static_cast<std::size_t>(m)], &c);
    clip_polygon(poly, n, c);
    if (poly.empty()) break;
  }
  // Drop slivers left by clipping through a vertex.
  std::vector<Vec3> out;
  const double eps = 1e-14 * box.diagonal();
  for (const Vec3& x : poly)
    if (out.empty() || (x - out.back()).norm() > eps) out.push_back(x);
  while (out.size() > 1 && (out.front() - out.back()).norm() <= eps) out.pop_back();
  if (out.size() < 3 || polygon_area(out) <= eps * eps) out.clear();
  return out;
}

}  // namespace

int VoronoiComplex::nearest_site(const Vec3& x, double* dist) const {
  return tree_->nearest(x, dist);
}

std::optional<int> VoronoiComplex::face_of(int v, int w) const {
  if (v < 0 || w < 0 || v == w || static_cast<std::size_t>(v) >= face_index_.size()) return std::nullopt;
  for (const auto& [o, f] : face_index_[static_cast<std::size_t>(v)])
    if (o == w) return f;
  return std::nullopt;
}

std::optional<int> VoronoiComplex::edge_of(int a, int b, int c) const {
  const auto f = face_of(a, b);
  if (!f) return std::nullopt;
  for (int e : faces_[static_cast<std::size_t>(*f)].edges) {
    const auto& s = edges_[static_cast<std::size_t>(e)].sites;
    if (std::binary_search(s.begin(), s.end(), c)) return e;
  }
  return std::nullopt;
}

void VoronoiComplex::index_faces() {
  tree_ = std::make_shared<KdTree>(sites_);
  face_index_.assign(sites_.size(), {});
  cells_.assign(sites_.size(), {});
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& F = faces_[f];
    face_index_[static_cast<std::size_t>(F.u)].emplace_back(F.w, static_cast<int>(f));
    face_index_[static_cast<std::size_t>(F.w)].emplace_back(F.u, static_cast<int>(f));
    for (int s : {F.u, F.w}) {
      cells_[static_cast<std::size_t>(s)].faces.push_back(static_cast<int>(f));
      cells_[static_cast<std::size_t>(s)].clipped |= F.clipped;
    }
  }
  // A site with no faces (only possible for a single site) owns the whole box.
  if (sites_.size() == 1) cells_[0].clipped = true;
  for (auto& F : faces_) F.edges.clear();
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& s = edges_[e].sites;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (const auto f = face_of(s[i], s[j])) faces_[static_cast<std::size_t>(*f)].edges.push_back(static_cast<int>(e));
  }
}

Box3 voronoi_clip_box(const ImplicitSurface& surface) {
  const Box3 b = surface.bounding_box();
  return b.inflated(3 * surface.lfs_upper_bound() + 0.05 * b.diagonal());
}

void require_clip_box(const Box3& box, const ImplicitSurface& surface) {
  const Box3 need = surface.bounding_box().inflated(3 * surface.lfs_upper_bound());
  if (!box.strictly_contains(need))
    throw VoronoiError("clip box must strictly contain the surface inflated by 3 lfs upper bounds");
}

VoronoiComplex dual_voronoi(const DelaunayComplex& delaunay, const Box3& box, const ImplicitSurface& surface) {
  require_clip_box(box, surface);
  return dual_voronoi(delaunay, box);
}

VoronoiComplex dual_voronoi(const DelaunayComplex& delaunay, const Box3& box) {
  const auto& sites = delaunay.sites();
  const auto& tets = delaunay.tetrahedra();
  auto P = [&](int i) -> const Vec3& { return sites[static_cast<std::size_t>(i)]; };
  for (const Vec3& p : sites)
    if (!box.contains(p)) throw VoronoiError("dual_voronoi: clip box does not contain every site");

  // Cospherical finite cells share one Voronoi vertex; coplanar cocircular
  // hull facets share one ray.
  UnionFind uf(tets.size());
  for (std::size_t i = 0; i < tets.size(); ++i) {
    const auto& t = tets[i];
    for (int k = 0; k < 4; ++k) {
      const int n = t.nbr[static_cast<std::size_t>(k)];
      if (n < static_cast<int>(i)) continue;
      const auto& o = tets[static_cast<std::size_t>(n)];
      int opp = -2;
      for (int s = 0; s < 4; ++s)
        if (t.slot_of(o.v[static_cast<std::size_t>(s)]) < 0) opp = o.v[static_cast<std::size_t>(s)];
      const bool ti = t.infinite(), oi = o.infinite();
      if (!ti && !oi) {
        if (predicates::oriented_in_sphere(P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3]), P(opp)) == 0)
          uf.unite(static_cast<int>(i), n);
      } else if (ti && oi && opp >= 0) {
        std::array<int, 3> f{};
        int j = 0;
        for (int s = 0; s < 4; ++s)
          if (t.v[static_cast<std::size_t>(s)] >= 0) f[static_cast<std::size_t>(j++)] = t.v[static_cast<std::size_t>(s)];
        if (predicates::orient3d(P(f[0]), P(f[1]), P(f[2]), P(opp)) == 0 &&
            predicates::coplanar_side_of_circle(P(f[0]), P(f[1]), P(f[2]), P(opp)) == 0)
          uf.unite(static_cast<int>(i), n);
      }
    }
  }

  VoronoiComplex vc;
  vc.sites_ = sites;
  vc.box_ = box;
  std::vector<int> group(tets.size());
  std::map<int, int> root_to_vertex;
  std::map<int, int> root_to_ray;
  int rays = 0;
  for (std::size_t i = 0; i < tets.size(); ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (tets[i].infinite()) {
      auto [it, fresh] = root_to_ray.emplace(r, rays);
      if (fresh) ++rays;
      group[i] = -1 - it->second;
      continue;
    }
    auto [it, fresh] = root_to_vertex.emplace(r, static_cast<int>(vc.vertices_.size()));
    if (fresh) {
      const auto& t = tets[i];
      const auto c = circumcenter(P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3]));
      if (!c) throw VoronoiError("dual_voronoi: flat Delaunay cell");
      vc.vertices_.push_back({*c, {}});
    }
    group[i] = it->second;
    auto& vs = vc.vertices_[static_cast<std::size_t>(it->second)].sites;
    vs.insert(vs.end(), tets[i].v.begin(), tets[i].v.end());
  }
  for (auto& v : vc.vertices_) {
    std::sort(v.sites.begin(), v.sites.end());
    v.sites.erase(std::unique(v.sites.begin(), v.sites.end()), v.sites.end());
  }

  // Edges: finite Delaunay triangles separating two groups.
  std::map<std::pair<int, int>, int> edge_of_groups;
  for (std::size_t i = 0; i < tets.size(); ++i) {
    const auto& t = tets[i];
    for (int k = 0; k < 4; ++k) {
      const int n = t.nbr[static_cast<std::size_t>(k)];
      const bool finite_face = !t.infinite() || t.v[static_cast<std::size_t>(k)] == kInfinite;
      if (!finite_face) continue;
      int g0 = group[i], g1 = group[static_cast<std::size_t>(n)];
      if (g0 == g1) continue;
      if (g0 < 0 && g1 < 0) continue;
      std::array<int, 3> f{};
      int j = 0;
      for (int s = 0; s < 4; ++s)
        if (s != k) f[static_cast<std::size_t>(j++)] = t.v[static_cast<std::size_t>(s)];
      if (g0 < 0) std::swap(g0, g1);
      // Finite-finite pairs are ordered by vertex id; rays keep the finite end first.
      if (g1 >= 0 && g1 < g0) std::swap(g0, g1);
      auto [it, fresh] = edge_of_groups.emplace(std::make_pair(g0, g1), static_cast<int>(vc.edges_.size()));
      if (fresh) {
        VoronoiEdge e;
        e.v0 = g0;
        e.v1 = g1 >= 0 ? g1 : -1;
        const Vec3& a = P(f[0]);
        const Vec3& b = P(f[1]);
        const Vec3& c = P(f[2]);
        e.line_point = circumcircle3(a, b, c).center;
        Vec3 nrm = (b - a).cross(c - a).normalized();
        const Vec3 origin = vc.vertices_[static_cast<std::size_t>(g0)].position;
        double t1 = 1;
        if (g1 >= 0) {
          const Vec3 d = vc.vertices_[static_cast<std::size_t>(g1)].position - origin;
          if (nrm.dot(d) < 0) nrm = -nrm;
          e.direction = nrm;
          t1 = d.norm();
        } else {
          // Outward: away from the finite cell behind the hull facet.
          const int fin = t.infinite() ? n : static_cast<int>(i);
          const auto& ft = tets[static_cast<std::size_t>(fin)];
          int opp = -1;
          for (int s = 0; s < 4; ++s)
            if (ft.v[static_cast<std::size_t>(s)] != f[0] && ft.v[static_cast<std::size_t>(s)] != f[1] &&
                ft.v[static_cast<std::size_t>(s)] != f[2])
              opp = ft.v[static_cast<std::size_t>(s)];
          if (nrm.dot(P(opp) - a) > 0) nrm = -nrm;
          e.direction = nrm;
          e.clipped = true;
          t1 = far_parameter(origin, box);
        }
        const auto iv = clip_line_to_box(origin, e.direction, 0.0, t1, box);
        if (iv) {
          e.a = origin + iv->first * e.direction;
          e.b = origin + iv->second * e.direction;
        } else {
          e.in_box = false;
          e.a = e.b = origin;
        }
        vc.edges_.push_back(e);
      }
      auto& es = vc.edges_[static_cast<std::size_t>(it->second)].sites;
      es.insert(es.end(), f.begin(), f.end());
    }
  }
  for (auto& e : vc.edges_) {
    std::sort(e.sites.begin(), e.sites.end());
    e.sites.erase(std::unique(e.sites.begin(), e.sites.end()), e.sites.end());
  }

  // Faces: Delaunay edges whose ring of cells meets at least three groups.
  std::map<std::uint64_t, std::vector<int>> rings;
  for (std::size_t i = 0; i < tets.size(); ++i) {
    const auto& t = tets[i];
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const int u = t.v[static_cast<std::size_t>(a)], w = t.v[static_cast<std::size_t>(b)];
        if (u < 0 || w < 0) continue;
        rings[pair_key(u, w)].push_back(group[i]);
      }
  }
  for (auto& [key, gs] : rings) {
    std::sort(gs.begin(), gs.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    if (gs.size() < 3) continue;
    VoronoiFace F;
    F.u = static_cast<int>(key >> 32);
    F.w = static_cast<int>(key & 0xffffffffu);
    F.bisector = Plane3d(0.5 * (P(F.u) + P(F.w)), P(F.w) - P(F.u));
    F.clipped = gs.front() < 0;
    F.polygon = clipped_face_polygon(sites, F.u, F.w, delaunay.neighbors()[static_cast<std::size_t>(F.u)], box);
    vc.faces_.push_back(std::move(F));
  }
  vc.index_faces();
  return vc;
}

VoronoiComplex brute_force_voronoi(const std::vector<Vec3>& sites, const Box3& box) {
  const int n = static_cast<int>(sites.size());
  if (n == 0) throw VoronoiError("brute_force_voronoi: no sites");
  for (const Vec3& p : sites)
    if (!box.contains(p)) throw VoronoiError("brute_force_voronoi: clip box does not contain every site");
  const double scale = box.diagonal();
  const double tol = tol::geometric_relative * scale;
  std::vector<int> all(sites.size());
  std::iota(all.begin(), all.end(), 0);

  VoronoiComplex vc;
  vc.sites_ = sites;
  vc.box_ = box;

  std::map<std::vector<int>, int> vertex_of_sites;
  auto vertex_at = [&](const Vec3& x, const std::vector<int>& base) {
    const double d0 = (x - sites[static_cast<std::size_t>(base[0])]).norm();
    std::vector<int> s;
    for (int m = 0; m < n; ++m)
      if (std::abs((x - sites[static_cast<std::size_t>(m)]).norm() - d0) <= tol) s.push_back(m);
    auto [it, fresh] = vertex_of_sites.emplace(s, static_cast<int>(vc.vertices_.size()));
    if (fresh) vc.vertices_.push_back({x, s});
    return it->second;
  };

  std::set<std::vector<int>> seen;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3& a = sites[static_cast<std::size_t>(i)];
        const Vec3& b = sites[static_cast<std::size_t>(j)];
        const Vec3& c = sites[static_cast<std::size_t>(k)];
        if (predicates::collinear(a, b, c)) continue;
        Circle3<double> cc;
        try {
          cc = circumcircle3(a, b, c);
        } catch (const GeometryError&) {
          continue;
        }
        const Vec3 d = (b - a).cross(c - a).normalized();
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        int lo_site = -1, hi_site = -1;
        std::vector<int> s{i, j, k};
        bool feasible = true;
        for (int m = 0; m < n && feasible; ++m) {
          if (m == i || m == j || m == k) continue;
          double rhs = 0;
          const Vec3 nm = bisector_halfspace(a, sites[static_cast<std::size_t>(m)], &rhs);
          rhs -= nm.dot(cc.center);
          const double coef = nm.dot(d);
          if (std::abs(coef) <= 1e-14 * nm.norm()) {
            if (std::abs(rhs) <= tol * nm.norm()) s.push_back(m);
            else if (rhs < 0) feasible = false;
            continue;
          }
          const double t = rhs / coef;
          if (coef > 0 && t < hi) {
            hi = t;
            hi_site = m;
          } else if (coef < 0 && t > lo) {
            lo = t;
            lo_site = m;
          }
        }
        if (!feasible || hi - lo <= tol) continue;
        std::sort(s.begin(), s.end());
        if (s[0] != i || s[1] != j || s[2] != k) continue;  // reported from its smallest triple
        if (!seen.insert(s).second) continue;
        VoronoiEdge e;
        e.sites = s;
        e.line_point = cc.center;
        e.direction = d;
        e.clipped = lo_site < 0 || hi_site < 0;
        const double far = far_parameter(cc.center, box);
        const double t0 = lo_site < 0 ? -far : lo, t1 = hi_site < 0 ? far : hi;
        if (lo_site >= 0) e.v0 = vertex_at(cc.center + lo * d, s);
        if (hi_site >= 0) e.v1 = vertex_at(cc.center + hi * d, s);
        const auto iv = clip_line_to_box(cc.center, d, t0, t1, box);
        if (iv) {
          e.a = cc.center + iv->first * d;
          e.b = cc.center + iv->second * d;
        } else {
          e.in_box = false;
          e.a = e.b = cc.center + t0 * d;
        }
        vc.edges_.push_back(e);
      }

  const double min_area = 1e-12 * scale * scale;
  for (int u = 0; u < n; ++u)
    for (int w = u + 1; w < n; ++w) {
      VoronoiFace F;
      F.u = u;
      F.w = w;
      F.bisector = Plane3d(0.5 * (sites[static_cast<std::size_t>(u)] + sites[static_cast<std::size_t>(w)]),
                           sites[static_cast<std::size_t>(w)] - sites[static_cast<std::size_t>(u)]);
      F.polygon = clipped_face_polygon(sites, u, w, all, box);
      if (F.polygon.size() < 3 || polygon_area(F.polygon) <= min_area) continue;
      vc.faces_.push_back(std::move(F));
    }
  vc.index_faces();
  for (auto& F : vc.faces_) {
    F.clipped = F.edges.empty();
    for (int e : F.edges) F.clipped |= vc.edges_[static_cast<std::size_t>(e)].clipped;
  }
  for (auto& c : vc.cells_) {
    c.clipped = c.faces.empty();
    for (int f : c.faces) c.clipped |= vc.faces_[static_cast<std::size_t>(f)].clipped;
  }
  return vc;
}

VoronoiComplex voronoi_of(const std::vector<Vec3>& sites, const Box3& box) {
  if (sites.size() >= 4) {
    try {
      return dual_voronoi(build_delaunay(sites), box);
    } catch (const DelaunayError& e) {
      if (std::string(e.what()).find("coplanar") == std::string::npos) throw;
    }
  }
  return brute_force_voronoi(sites, box);
}

}  // namespace rdt
