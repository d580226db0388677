#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "rdt/delaunay.hpp"
#include "rdt/geometry.hpp"
#include "rdt/spatial_grid.hpp"

namespace rdt {

class ImplicitSurface;

class VoronoiError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VoronoiVertex {
  Vec3 position;
  std::vector<int> sites;  // sorted; four or more when cospherical
};

/// Piece of the line equidistant from `sites` (the dual Delaunay triangle, or
/// polygon when cocircular). v0/v1 are vertex ids, -1 at infinity.
struct VoronoiEdge {
  std::vector<int> sites;
  int v0 = -1;
  int v1 = -1;
  Vec3 line_point = Vec3::Zero();  // circumcentre of the site triangle
  Vec3 direction = Vec3::UnitZ();  // unit, from v0 toward v1 (or outward)
  Vec3 a = Vec3::Zero();           // box-clipped segment
  Vec3 b = Vec3::Zero();
  bool clipped = false;  // unbounded before clipping
  bool in_box = true;    // false when the whole edge lies outside the box
};

/// Convex polygon on the bisector of sites u < w, clipped to the box.
struct VoronoiFace {
  int u = -1;
  int w = -1;
  Plane3d bisector{Vec3::Zero(), Vec3::UnitX()};
  std::vector<Vec3> polygon;  // counter-clockwise about w - u
  std::vector<int> edges;     // Voronoi edges on its boundary
  bool clipped = false;
};

struct VoronoiCell {
  std::vector<int> faces;
  bool clipped = false;
};

class VoronoiComplex {
 public:
  const std::vector<Vec3>& sites() const { return sites_; }
  const Box3& box() const { return box_; }
  const std::vector<VoronoiVertex>& vertices() const { return vertices_; }
  const std::vector<VoronoiEdge>& edges() const { return edges_; }
  const std::vector<VoronoiFace>& faces() const { return faces_; }
  const std::vector<VoronoiCell>& cells() const { return cells_; }

  /// Face shared by the cells of v and w, if any.
  std::optional<int> face_of(int v, int w) const;
  /// Edge equidistant from the three sites, if any.
  std::optional<int> edge_of(int a, int b, int c) const;

  /// Distance from x to its nearest site, and that site (lowest index on ties).
  int nearest_site(const Vec3& x, double* dist = nullptr) const;

 private:
  friend VoronoiComplex dual_voronoi(const DelaunayComplex&, const Box3&);
  friend VoronoiComplex brute_force_voronoi(const std::vector<Vec3>&, const Box3&);
  void index_faces();

  std::vector<Vec3> sites_;
  Box3 box_;
  std::vector<VoronoiVertex> vertices_;
  std::vector<VoronoiEdge> edges_;
  std::vector<VoronoiFace> faces_;
  std::vector<VoronoiCell> cells_;
  std::vector<std::vector<std::pair<int, int>>> face_index_;  // per site: (other site, face)
  std::shared_ptr<KdTree> tree_;
};

/// Box that satisfies the clip requirement for a surface: its bounding box
/// inflated by three times the lfs upper bound, plus a margin.
Box3 voronoi_clip_box(const ImplicitSurface& surface);

/// Throws VoronoiError unless `box` strictly contains the surface's bounding
/// box inflated by three times its lfs upper bound.
void require_clip_box(const Box3& box, const ImplicitSurface& surface);

/// Voronoi diagram dual to a Delaunay complex. Cospherical Delaunay cells
/// collapse to a single Voronoi vertex.
VoronoiComplex dual_voronoi(const DelaunayComplex& delaunay, const Box3& box);
VoronoiComplex dual_voronoi(const DelaunayComplex& delaunay, const Box3& box, const ImplicitSurface& surface);

/// Direct halfspace construction over all pairs and triples. Intended for
/// small inputs, fewer than four sites, or coplanar sites.
VoronoiComplex brute_force_voronoi(const std::vector<Vec3>& sites, const Box3& box);

/// Delaunay dual when possible, brute force for fewer than four or coplanar sites.
VoronoiComplex voronoi_of(const std::vector<Vec3>& sites, const Box3& box);

/// Clip a convex polygon to the halfspace n.x <= c.
void clip_polygon(std::vector<Vec3>& polygon, const Vec3& n, double c);

/// The bisector plane of u and w intersected with a box, as a convex polygon.
std::vector<Vec3> plane_box_polygon(const Plane3d& plane, const Box3& box);

}  // namespace rdt
