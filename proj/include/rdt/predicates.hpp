#pragma once

#include <array>

#include "rdt/geometry.hpp"

namespace rdt::predicates {

// All predicates are exact as long as no intermediate product underflows,
// which holds when nonzero coordinates and their pairwise differences are
// larger than about 1e-60 in magnitude (in particular, no subnormal input).

/// Sign of det[b-a; c-a; d-a]: +1 when d lies on the side of plane abc
/// that makes (a,b,c,d) positively oriented.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Sign of det[b-a; c-a] in the plane. Exact.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// Exact insphere determinant sign relative to the orientation of (a,b,c,d):
/// +1 when e is inside the circumsphere of a positively oriented tetrahedron.
/// For negatively oriented inputs the sign flips.
int oriented_in_sphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

/// Orientation-independent insphere: +1 inside, -1 outside, 0 on the sphere.
/// Throws GeometryError when a,b,c,d are coplanar.
int in_sphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

/// Orientation of three coplanar points within their common plane, using the
/// first non-degenerate coordinate projection (xy, yz, zx). 0 iff collinear.
int coplanar_orientation(const Vec3& p, const Vec3& q, const Vec3& r);

/// For p coplanar with a non-collinear triangle: +1 inside its circumcircle,
/// -1 outside, 0 on it. Exact.
int coplanar_side_of_circle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p);

/// True when the three points are exactly collinear.
bool collinear(const Vec3& a, const Vec3& b, const Vec3& c);

/// A point tagged with its site index; the index keys the symbolic perturbation.
struct IndexedPoint {
  const Vec3* p;
  int index;
};

/// Insphere under the deterministic symbolic perturbation (larger index =
/// larger perturbation). (p0..p3) must be positively oriented. Never 0 for
/// distinct indices: +1 inside, -1 outside.
int in_sphere_perturbed(const std::array<IndexedPoint, 4>& tet, IndexedPoint e);

/// Circle test for a point coplanar with a triangle under the same perturbation:
/// +1 inside, -1 outside. Never 0 for distinct indices.
int coplanar_side_of_circle_perturbed(const std::array<IndexedPoint, 3>& tri, IndexedPoint e);

/// Counters for how often the exact fallback was taken (diagnostics only).
struct FallbackCounters {
  long long orient3d_exact = 0;
  long long insphere_exact = 0;
};
FallbackCounters fallback_counters();

}  // namespace rdt::predicates
