#include "rdt/rdt_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace rdt {

namespace {

std::array<int, 2> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

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
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

// Cyclic order of sites around an axis, oriented so the polygon normal agrees with n.
std::vector<int> orient_cycle(std::vector<int> ids, const std::vector<Vec3>& sites, const Vec3& centre, const Vec3& axis,
                              const Vec3& n) {
  const auto [t1, t2] = tangent_frame(axis);
  std::vector<std::pair<double, int>> ang;
  for (int s : ids) {
    const Vec3 d = sites[static_cast<std::size_t>(s)] - centre;
    ang.emplace_back(std::atan2(d.dot(t2), d.dot(t1)), s);
  }
  std::sort(ang.begin(), ang.end());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = ang[i].second;
  const Vec3& a = sites[static_cast<std::size_t>(ids[0])];
  const Vec3& b = sites[static_cast<std::size_t>(ids[1])];
  const Vec3& c = sites[static_cast<std::size_t>(ids[2])];
  if ((b - a).cross(c - a).dot(n) < 0) std::reverse(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::vector<std::array<int, 3>> RdtMesh::triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& f : faces)
    for (std::size_t i = 1; i + 1 < f.size(); ++i) out.push_back({f[0], f[i], f[i + 1]});
  return out;
}

std::vector<std::array<int, 3>> RdtMesh::triangle_keys() const {
  auto t = triangles();
  for (auto& k : t) std::sort(k.begin(), k.end());
  std::sort(t.begin(), t.end());
  return t;
}

RdtMesh dualize(const RestrictedComplex& rc, const ImplicitSurface& surface) {
  const VoronoiComplex& vc = rc.voronoi();
  RdtMesh m;
  m.sites = vc.sites();
  for (const auto& cell : rc.cells())
    if (!cell.empty()) m.vertices.push_back(cell.site);

  std::set<std::vector<int>> seen;
  for (std::size_t i = 0; i < rc.vertices().size(); ++i) {
    const RestrictedVertex& rv = rc.vertices()[i];
    if (rv.sites.size() < 3)
      throw RdtError("restricted vertex " + std::to_string(i) + " has fewer than three incident sites");
    std::vector<int> key = rv.sites;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) continue;
    const VoronoiEdge& E = vc.edges()[static_cast<std::size_t>(rv.edge)];
    m.faces.push_back(orient_cycle(key, m.sites, rv.position, E.direction, surface.gradient(rv.position)));
    m.face_source.push_back(static_cast<int>(i));
  }

  std::set<std::array<int, 2>> edges;
  for (const auto& e : rc.edges()) {
    const VoronoiFace& F = vc.faces()[static_cast<std::size_t>(e.face)];
    edges.insert(edge_key(F.u, F.w));
  }
  m.edges.assign(edges.begin(), edges.end());
  return m;
}

RdtMesh brute_force_rdt(const std::vector<Vec3>& sites, const ImplicitSurface& surface) {
  const Box3 box = voronoi_clip_box(surface);
  const double tol = surface.on_surface_tolerance();
  const double step = 2e-4 * box.diagonal();
  const int n = static_cast<int>(sites.size());
  RdtMesh m;
  m.sites = sites;
  std::set<std::array<int, 3>> found;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3 &a = sites[static_cast<std::size_t>(i)], &b = sites[static_cast<std::size_t>(j)],
                   &c = sites[static_cast<std::size_t>(k)];
        Circle3<double> circ;
        try {
          circ = circumcircle3(a, b, c);
        } catch (const GeometryError&) {
          continue;
        }
        const Vec3 dir = (b - a).cross(c - a).normalized();
        const auto span = clip_line_to_box(circ.center, dir, -std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity(), box);
        if (!span) continue;
        const auto [t0, t1] = *span;
        const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step)));
        auto S = [&](double t) { return surface.value(circ.center + t * dir); };
        double tp = t0, sp = S(t0);
        for (int s = 1; s <= steps; ++s) {
          const double tq = t0 + (t1 - t0) * s / steps;
          const double sq = S(tq);
          if ((sp < 0) != (sq < 0)) {
            double lo = tp, hi = tq, slo = sp;
            for (int it = 0; it < 100; ++it) {
              const double mid = 0.5 * (lo + hi);
              const double sm = S(mid);
              if ((sm < 0) == (slo < 0)) {
                lo = mid;
                slo = sm;
              } else {
                hi = mid;
              }
            }
            const Vec3 x = circ.center + 0.5 * (lo + hi) * dir;
            const double d = (x - a).norm();
            bool nearest = true;
            for (int l = 0; l < n && nearest; ++l)
              if (l != i && l != j && l != k && (x - sites[static_cast<std::size_t>(l)]).norm() < d - tol) nearest = false;
            if (nearest && found.insert({i, j, k}).second) {
              std::vector<int> f{i, j, k};
              if ((b - a).cross(c - a).dot(surface.gradient(x)) < 0) std::swap(f[1], f[2]);
              m.faces.push_back(std::move(f));
              m.face_source.push_back(-1);
            }
          }
          tp = tq;
          sp = sq;
        }
      }
  std::set<int> verts;
  std::set<std::array<int, 2>> edges;
  for (const auto& f : m.faces)
    for (std::size_t q = 0; q < f.size(); ++q) {
      verts.insert(f[q]);
      edges.insert(edge_key(f[q], f[(q + 1) % f.size()]));
    }
  m.vertices.assign(verts.begin(), verts.end());
  m.edges.assign(edges.begin(), edges.end());
  return m;
}

TopologyReport validate(const RdtMesh& mesh, const ImplicitSurface& surface) {
  TopologyReport r;
  r.degenerate = mesh.degenerate();
  std::map<std::array<int, 2>, std::vector<int>> incident;  // edge -> faces
  std::map<std::array<int, 2>, int> directed;
  for (const auto& e : mesh.edges) incident[e];
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& F = mesh.faces[f];
    for (std::size_t q = 0; q < F.size(); ++q) {
      const int a = F[q], b = F[(q + 1) % F.size()];
      incident[edge_key(a, b)].push_back(static_cast<int>(f));
      ++directed[{a, b}];
    }
  }
  r.vertex_count = static_cast<int>(mesh.vertices.size());
  r.edge_count = static_cast<int>(incident.size());
  r.face_count = static_cast<int>(mesh.faces.size());
  r.euler = r.vertex_count - r.edge_count + r.face_count;
  for (const auto& [e, fs] : incident) {
    ++r.edge_incidence[static_cast<int>(fs.size())];
    if (fs.size() != 2) r.edge_manifold = false;
  }

  // Vertex links must be single cycles.
  std::map<int, std::vector<std::array<int, 2>>> link;
  for (const auto& F : mesh.faces)
    for (std::size_t q = 0; q < F.size(); ++q)
      link[F[q]].push_back({F[(q + F.size() - 1) % F.size()], F[(q + 1) % F.size()]});
  for (int v : mesh.vertices) {
    auto it = link.find(v);
    if (it == link.end()) {
      r.vertex_manifold = false;
      continue;
    }
    std::map<int, std::vector<int>> adj;
    for (const auto& [p, q] : it->second) {
      adj[p].push_back(q);
      adj[q].push_back(p);
    }
    bool ok = true;
    for (const auto& [x, ns] : adj) ok = ok && ns.size() == 2;
    if (ok) {
      std::set<int> reached{adj.begin()->first};
      std::vector<int> stack{adj.begin()->first};
      while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
          if (reached.insert(y).second) stack.push_back(y);
      }
      ok = reached.size() == adj.size();
    }
    if (!ok) r.vertex_manifold = false;
  }
  r.manifold = !r.degenerate && r.edge_manifold && r.vertex_manifold;

  r.coherently_oriented = r.edge_manifold;
  for (const auto& [d, count] : directed)
    if (count != 1 || !directed.count({d[1], d[0]})) r.coherently_oriented = false;
  if (r.edge_manifold) {
    // Propagate an orientation across shared edges; a conflict means non-orientable.
    std::vector<int> flip(mesh.faces.size(), 0);
    r.orientable = true;
    auto same_direction = [&](std::size_t f, std::size_t g, const std::array<int, 2>& e) {
      auto dir_in = [&](std::size_t h) {
        const auto& F = mesh.faces[h];
        for (std::size_t q = 0; q < F.size(); ++q)
          if (F[q] == e[0] && F[(q + 1) % F.size()] == e[1]) return 1;
        return -1;
      };
      return dir_in(f) == dir_in(g);
    };
    for (std::size_t s = 0; s < mesh.faces.size() && r.orientable; ++s) {
      if (flip[s]) continue;
      flip[s] = 1;
      std::vector<std::size_t> stack{s};
      while (!stack.empty() && r.orientable) {
        const std::size_t f = stack.back();
        stack.pop_back();
        const auto& F = mesh.faces[f];
        for (std::size_t q = 0; q < F.size(); ++q) {
          const auto e = edge_key(F[q], F[(q + 1) % F.size()]);
          for (int g0 : incident[e]) {
            const auto g = static_cast<std::size_t>(g0);
            if (g == f) continue;
            // Adjacent faces must traverse the shared edge in opposite directions.
            const int want = same_direction(f, g, e) ? -flip[f] : flip[f];
            if (!flip[g]) {
              flip[g] = want;
              stack.push_back(g);
            } else if (flip[g] != want) {
              r.orientable = false;
            }
          }
        }
      }
    }
  }

  // Components and per-component Euler characteristic.
  const std::size_t ns = mesh.sites.size();
  UnionFind uf(ns);
  for (const auto& [e, fs] : incident) uf.unite(e[0], e[1]);
  std::map<int, int> comp_index;
  for (int v : mesh.vertices)
    if (!comp_index.count(uf.find(v))) {
      const int id = static_cast<int>(comp_index.size());
      comp_index[uf.find(v)] = id;
    }
  r.component_count = static_cast<int>(comp_index.size());
  r.components.assign(comp_index.size(), {});
  std::vector<std::set<int>> surf(comp_index.size());
  for (int v : mesh.vertices) {
    auto& c = r.components[static_cast<std::size_t>(comp_index[uf.find(v)])];
    ++c.vertices;
    surf[static_cast<std::size_t>(comp_index[uf.find(v)])].insert(surface.component_of(mesh.sites[static_cast<std::size_t>(v)]));
  }
  for (const auto& [e, fs] : incident) ++r.components[static_cast<std::size_t>(comp_index[uf.find(e[0])])].edges;
  for (const auto& F : mesh.faces) ++r.components[static_cast<std::size_t>(comp_index[uf.find(F[0])])].faces;
  r.expected_components = surface.component_count();
  r.expected_euler = surface.reference_euler_total();
  std::vector<int> covered(static_cast<std::size_t>(surface.component_count()), 0);
  r.euler_match = !r.components.empty();
  for (std::size_t c = 0; c < r.components.size(); ++c) {
    auto& C = r.components[c];
    C.euler = C.vertices - C.edges + C.faces;
    if (surf[c].size() == 1) {
      C.surface_component = *surf[c].begin();
      C.expected_euler = surface.reference_euler(C.surface_component);
      ++covered[static_cast<std::size_t>(C.surface_component)];
    }
    if (C.surface_component < 0 || C.euler != C.expected_euler) r.euler_match = false;
  }
  r.component_match = r.component_count == r.expected_components &&
                      std::all_of(covered.begin(), covered.end(), [](int k) { return k == 1; });
  if (r.euler != r.expected_euler) r.euler_match = false;
  return r;
}

}  // namespace rdt
