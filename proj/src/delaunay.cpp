#include "rdt/delaunay.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_map>

#include "rdt/predicates.hpp"

namespace rdt {

namespace {

using predicates::IndexedPoint;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a + 1)) << 32) |
         static_cast<std::uint32_t>(b + 1);
}

struct FaceKey {
  std::array<int, 3> v;
  bool operator==(const FaceKey& o) const { return v == o.v; }
};

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int x : k.v) h = (h ^ static_cast<std::uint64_t>(x + 1)) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

FaceKey face_of(const Tetrahedron& t, int i) {
  FaceKey k{};
  int j = 0;
  for (int s = 0; s < 4; ++s)
    if (s != i) k.v[static_cast<std::size_t>(j++)] = t.v[static_cast<std::size_t>(s)];
  std::sort(k.v.begin(), k.v.end());
  return k;
}

class Builder {
 public:
  Builder(const std::vector<Vec3>& sites, std::vector<int> order) : pts_(sites), perm_(std::move(order)) {}

  void run(std::vector<Tetrahedron>& out, std::int64_t& perturbed) {
    const std::vector<int> order = initial_order();
    for (std::size_t k = 4; k < order.size(); ++k) insert(order[k]);
    out.clear();
    for (std::size_t i = 0; i < tets_.size(); ++i)
      if (alive_[i]) out.push_back(tets_[i]);
    // Compact the neighbour indices to the surviving tetrahedra.
    std::vector<int> remap(tets_.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < tets_.size(); ++i)
      if (alive_[i]) remap[i] = next++;
    for (auto& t : out)
      for (auto& n : t.nbr) n = remap[static_cast<std::size_t>(n)];
    perturbed = perturbed_;
  }

 private:
  const std::vector<Vec3>& pts_;
  std::vector<int> perm_;
  std::vector<Tetrahedron> tets_;
  std::vector<char> alive_;
  std::vector<int> free_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
  std::int64_t perturbed_ = 0;

  const Vec3& P(int i) const { return pts_[static_cast<std::size_t>(i)]; }

  std::vector<int> initial_order() {
    const std::size_t n = perm_.size();
    const int i0 = perm_[0], i1 = perm_[1];
    int i2 = -1, i3 = -1;
    for (std::size_t k = 2; k < n && i2 < 0; ++k)
      if (!predicates::collinear(P(i0), P(i1), P(perm_[k]))) i2 = perm_[k];
    if (i2 >= 0)
      for (std::size_t k = 2; k < n && i3 < 0; ++k)
        if (perm_[k] != i2 && predicates::orient3d(P(i0), P(i1), P(i2), P(perm_[k])) != 0) i3 = perm_[k];
    if (i3 < 0) throw DelaunayError("build_delaunay: all sites are coplanar; use the 2D module");

    std::array<int, 4> v{i0, i1, i2, i3};
    if (predicates::orient3d(P(v[0]), P(v[1]), P(v[2]), P(v[3])) < 0) std::swap(v[2], v[3]);
    std::vector<int> ids;
    ids.push_back(new_tet(v));
    for (int i = 0; i < 4; ++i) {
      std::array<int, 4> w = v;
      w[static_cast<std::size_t>(i)] = kInfinite;
      // Swap two finite slots so that points beyond the facet test positive.
      const int a = (i + 1) % 4, b = (i + 2) % 4;
      std::swap(w[static_cast<std::size_t>(a)], w[static_cast<std::size_t>(b)]);
      ids.push_back(new_tet(w));
    }
    link(ids);
    last_ = ids[0];

    std::vector<int> order{i0, i1, i2, i3};
    for (std::size_t k = 2; k < n; ++k)
      if (perm_[k] != i2 && perm_[k] != i3) order.push_back(perm_[k]);
    return order;
  }

  int new_tet(const std::array<int, 4>& v) {
    int id;
    if (!free_.empty()) {
      id = free_.back();
      free_.pop_back();
      tets_[static_cast<std::size_t>(id)] = Tetrahedron{v, {-1, -1, -1, -1}};
      alive_[static_cast<std::size_t>(id)] = 1;
    } else {
      id = static_cast<int>(tets_.size());
      tets_.push_back(Tetrahedron{v, {-1, -1, -1, -1}});
      alive_.push_back(1);
      mark_.push_back(0);
    }
    return id;
  }

  void link(const std::vector<int>& ids) {
    std::unordered_map<FaceKey, std::pair<int, int>, FaceKeyHash> open;
    for (int id : ids)
      for (int i = 0; i < 4; ++i) {
        const FaceKey k = face_of(tets_[static_cast<std::size_t>(id)], i);
        auto it = open.find(k);
        if (it == open.end()) {
          open.emplace(k, std::make_pair(id, i));
        } else {
          const auto [o, j] = it->second;
          tets_[static_cast<std::size_t>(id)].nbr[static_cast<std::size_t>(i)] = o;
          tets_[static_cast<std::size_t>(o)].nbr[static_cast<std::size_t>(j)] = id;
          open.erase(it);
        }
      }
  }

  // Orientation of t with vertex slot i replaced by point q.
  int orient_with(const Tetrahedron& t, int i, const Vec3& q) const {
    std::array<const Vec3*, 4> p;
    for (int s = 0; s < 4; ++s) p[static_cast<std::size_t>(s)] = s == i ? &q : &P(t.v[static_cast<std::size_t>(s)]);
    return predicates::orient3d(*p[0], *p[1], *p[2], *p[3]);
  }

  bool in_conflict(int id, int q) {
    const Tetrahedron& t = tets_[static_cast<std::size_t>(id)];
    const int inf = t.slot_of(kInfinite);
    if (inf < 0) {
      const int s = predicates::oriented_in_sphere(P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3]), P(q));
      if (s != 0) return s > 0;
      ++perturbed_;
      std::array<IndexedPoint, 4> tp;
      for (int s2 = 0; s2 < 4; ++s2)
        tp[static_cast<std::size_t>(s2)] = {&P(t.v[static_cast<std::size_t>(s2)]), t.v[static_cast<std::size_t>(s2)]};
      return predicates::in_sphere_perturbed(tp, {&P(q), q}) > 0;
    }
    const int o = orient_with(t, inf, P(q));
    if (o != 0) return o > 0;
    std::array<IndexedPoint, 3> tri;
    int j = 0;
    for (int s = 0; s < 4; ++s)
      if (s != inf) tri[static_cast<std::size_t>(j++)] = {&P(t.v[static_cast<std::size_t>(s)]), t.v[static_cast<std::size_t>(s)]};
    if (predicates::coplanar_side_of_circle(*tri[0].p, *tri[1].p, *tri[2].p, P(q)) == 0) ++perturbed_;
    return predicates::coplanar_side_of_circle_perturbed(tri, {&P(q), q}) > 0;
  }

  int locate(int q) {
    const Vec3& p = P(q);
    int cur = last_;
    if (!alive_[static_cast<std::size_t>(cur)]) cur = first_alive();
    const std::size_t cap = 4 * tets_.size() + 64;
    for (std::size_t step = 0; step < cap; ++step) {
      const Tetrahedron& t = tets_[static_cast<std::size_t>(cur)];
      const int inf = t.slot_of(kInfinite);
      if (inf >= 0) {
        if (in_conflict(cur, q)) return cur;
        cur = t.nbr[static_cast<std::size_t>(inf)];
        continue;
      }
      int next = -1;
      for (int k = 0; k < 4 && next < 0; ++k) {
        const int i = static_cast<int>((k + step) % 4);
        if (orient_with(t, i, p) < 0) next = t.nbr[static_cast<std::size_t>(i)];
      }
      if (next < 0) return cur;
      cur = next;
    }
    for (std::size_t i = 0; i < tets_.size(); ++i)
      if (alive_[i] && in_conflict(static_cast<int>(i), q)) return static_cast<int>(i);
    throw DelaunayError("build_delaunay: point location failed");
  }

  int first_alive() const {
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) return static_cast<int>(i);
    throw DelaunayError("build_delaunay: empty triangulation");
  }

  void insert(int q) {
    const int start = locate(q);
    if (!in_conflict(start, q)) throw DelaunayError("build_delaunay: located cell not in conflict");
    ++stamp_;
    std::vector<int> cavity{start};
    mark_[static_cast<std::size_t>(start)] = stamp_;
    struct Boundary {
      int tet, slot, outside;
    };
    std::vector<Boundary> boundary;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const int c = cavity[k];
      for (int i = 0; i < 4; ++i) {
        const int n = tets_[static_cast<std::size_t>(c)].nbr[static_cast<std::size_t>(i)];
        if (mark_[static_cast<std::size_t>(n)] == stamp_) continue;
        if (mark_[static_cast<std::size_t>(n)] == -stamp_ || !in_conflict(n, q)) {
          mark_[static_cast<std::size_t>(n)] = -stamp_;
          boundary.push_back({c, i, n});
        } else {
          mark_[static_cast<std::size_t>(n)] = stamp_;
          cavity.push_back(n);
        }
      }
    }

    std::unordered_map<std::uint64_t, std::pair<int, int>> open;
    open.reserve(boundary.size() * 3);
    int any = -1;
    for (const auto& b : boundary) {
      std::array<int, 4> v = tets_[static_cast<std::size_t>(b.tet)].v;
      v[static_cast<std::size_t>(b.slot)] = q;
      const int id = new_tet(v);
      Tetrahedron& t = tets_[static_cast<std::size_t>(id)];
      if (t.slot_of(kInfinite) < 0 && predicates::orient3d(P(v[0]), P(v[1]), P(v[2]), P(v[3])) <= 0)
        throw DelaunayError("build_delaunay: cavity is not star-shaped");
      t.nbr[static_cast<std::size_t>(b.slot)] = b.outside;
      Tetrahedron& o = tets_[static_cast<std::size_t>(b.outside)];
      for (int j = 0; j < 4; ++j)
        if (o.nbr[static_cast<std::size_t>(j)] == b.tet) o.nbr[static_cast<std::size_t>(j)] = id;
      for (int i = 0; i < 4; ++i) {
        if (i == b.slot) continue;
        int e0 = -2, e1 = -2;
        for (int s = 0; s < 4; ++s) {
          if (s == i || s == b.slot) continue;
          (e0 == -2 ? e0 : e1) = v[static_cast<std::size_t>(s)];
        }
        const std::uint64_t key = edge_key(e0, e1);
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(id, i));
        } else {
          const auto [oid, oi] = it->second;
          tets_[static_cast<std::size_t>(id)].nbr[static_cast<std::size_t>(i)] = oid;
          tets_[static_cast<std::size_t>(oid)].nbr[static_cast<std::size_t>(oi)] = id;
          open.erase(it);
        }
      }
      any = id;
    }
    if (!open.empty()) throw DelaunayError("build_delaunay: cavity boundary is not closed");
    // Freed cells are recycled only after the new ones are linked, so the
    // outside-neighbour fixups above never touch a recycled slot.
    for (int c : cavity) {
      alive_[static_cast<std::size_t>(c)] = 0;
      free_.push_back(c);
    }
    last_ = any;
  }
};

}  // namespace

std::size_t DelaunayComplex::finite_count() const {
  return static_cast<std::size_t>(
      std::count_if(tets_.begin(), tets_.end(), [](const Tetrahedron& t) { return !t.infinite(); }));
}

std::vector<std::array<int, 3>> DelaunayComplex::hull_triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tets_) {
    const int k = t.slot_of(kInfinite);
    if (k < 0) continue;
    std::array<int, 3> f{};
    int j = 0;
    for (int s = 0; s < 4; ++s)
      if (s != k) f[static_cast<std::size_t>(j++)] = t.v[static_cast<std::size_t>(s)];
    if ((3 - k) % 2 == 1) std::swap(f[0], f[1]);
    out.push_back(f);
  }
  return out;
}

DelaunayComplex build_delaunay(const std::vector<Vec3>& sites, const DelaunayOptions& options) {
  if (sites.size() < 4) throw DelaunayError("build_delaunay: at least four sites are required");
  for (const Vec3& p : sites)
    if (!p.allFinite()) throw DelaunayError("build_delaunay: non-finite site");
  std::vector<int> idx(sites.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto lex = [&](int a, int b) {
    const Vec3& p = sites[static_cast<std::size_t>(a)];
    const Vec3& q = sites[static_cast<std::size_t>(b)];
    return std::tie(p.x(), p.y(), p.z()) < std::tie(q.x(), q.y(), q.z());
  };
  std::sort(idx.begin(), idx.end(), lex);
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (sites[static_cast<std::size_t>(idx[i])] == sites[static_cast<std::size_t>(idx[i - 1])])
      throw DelaunayError("build_delaunay: duplicate sites " + std::to_string(idx[i - 1]) + " and " +
                          std::to_string(idx[i]));

  DelaunayComplex d;
  d.sites_ = sites;
  std::vector<int> perm(sites.size());
  std::iota(perm.begin(), perm.end(), 0);
  if (options.shuffle_seed) {
    std::mt19937_64 rng(*options.shuffle_seed);
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  Builder b(sites, std::move(perm));
  b.run(d.tets_, d.perturbed_);

  d.neighbors_.assign(sites.size(), {});
  for (const auto& t : d.tets_)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const int u = t.v[static_cast<std::size_t>(a)], w = t.v[static_cast<std::size_t>(b)];
        if (u < 0 || w < 0) continue;
        d.neighbors_[static_cast<std::size_t>(u)].push_back(w);
        d.neighbors_[static_cast<std::size_t>(w)].push_back(u);
      }
  for (auto& n : d.neighbors_) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  return d;
}

}  // namespace rdt
