#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <variant>

#include "rdt/tolerances.hpp"

namespace rdt {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Point3 = Vector3<Scalar>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec3 = Vector3<double>;
using Vec2 = Vector2<double>;

/// Thrown when a geometric construction has no well-defined answer
/// (collinear circumcircle, degenerate base simplex, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plane through `point` with unit `normal`.
template <typename Scalar>
struct Plane {
  Point3<Scalar> point;
  Vector3<Scalar> normal;

  Plane(const Point3<Scalar>& p, const Vector3<Scalar>& n) : point(p), normal(n.normalized()) {}

  Scalar signed_distance(const Point3<Scalar>& p) const { return (p - point).dot(normal); }
};

template <typename Scalar>
struct Segment {
  Point3<Scalar> a;
  Point3<Scalar> b;

  Point3<Scalar> at(Scalar t) const { return a + t * (b - a); }
  Scalar length() const { return (b - a).norm(); }
};

template <typename Scalar>
struct Ray {
  Point3<Scalar> origin;
  Vector3<Scalar> direction;  // unit

  Ray(const Point3<Scalar>& o, const Vector3<Scalar>& d) : origin(o), direction(d.normalized()) {}
  Point3<Scalar> at(Scalar t) const { return origin + t * direction; }
};

using Plane3d = Plane<double>;
using Segment3d = Segment<double>;
using Ray3d = Ray<double>;

template <typename Scalar>
bool is_unit(const Vector3<Scalar>& v) {
  using std::abs;
  return abs(v.norm() - Scalar(1)) < Scalar(tol::unit_norm);
}

/// Orthogonal projection onto a plane (the map onto a tangent plane).
template <typename Scalar>
Point3<Scalar> project_to_plane(const Point3<Scalar>& p, const Plane<Scalar>& pl) {
  return p - pl.signed_distance(p) * pl.normal;
}

template <typename Scalar>
struct Circle3 {
  Point3<Scalar> center;
  Scalar radius;
};

/// Circumcircle of a triangle in space. Throws GeometryError for collinear input.
template <typename Scalar>
Circle3<Scalar> circumcircle3(const Point3<Scalar>& a, const Point3<Scalar>& b, const Point3<Scalar>& c) {
  const Vector3<Scalar> ab = b - a;
  const Vector3<Scalar> ac = c - a;
  const Vector3<Scalar> n = ab.cross(ac);
  const Scalar n2 = n.squaredNorm();
  const Scalar scale = ab.squaredNorm() * ac.squaredNorm();
  if (!(n2 > Scalar(1e-28) * scale)) {
    throw GeometryError("circumcircle3: collinear points");
  }
  // Standard closed form; offset from a lies in the triangle's plane.
  const Vector3<Scalar> offset = (ac.squaredNorm() * n.cross(ab) + ab.squaredNorm() * ac.cross(n)) / (Scalar(2) * n2);
  return {a + offset, offset.norm()};
}

/// Circumcenter of a tetrahedron; nullopt when the tetrahedron is flat.
template <typename Scalar>
std::optional<Point3<Scalar>> circumcenter(const Point3<Scalar>& a, const Point3<Scalar>& b, const Point3<Scalar>& c,
                                           const Point3<Scalar>& d) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m.row(0) = (b - a).transpose();
  m.row(1) = (c - a).transpose();
  m.row(2) = (d - a).transpose();
  const Scalar det = m.determinant();
  if (det == Scalar(0)) return std::nullopt;
  const Vector3<Scalar> rhs((b - a).squaredNorm() / 2, (c - a).squaredNorm() / 2, (d - a).squaredNorm() / 2);
  const Eigen::Matrix<Scalar, 3, 3> inv = m.inverse();
  return a + inv * rhs;
}

struct SegmentContained {};
struct SegmentMisses {};

/// Result of intersecting a segment with a plane: no point, one point with its
/// segment parameter, or the whole segment lying in the plane.
template <typename Scalar>
struct SegmentPlaneHit {
  Scalar t;
  Point3<Scalar> point;
};

template <typename Scalar>
using SegmentPlaneResult = std::variant<SegmentMisses, SegmentPlaneHit<Scalar>, SegmentContained>;

template <typename Scalar>
SegmentPlaneResult<Scalar> segment_plane_intersection(const Segment<Scalar>& s, const Plane<Scalar>& pl) {
  const Scalar da = pl.signed_distance(s.a);
  const Scalar db = pl.signed_distance(s.b);
  if (da == Scalar(0) && db == Scalar(0)) return SegmentContained{};
  if ((da > 0 && db > 0) || (da < 0 && db < 0)) return SegmentMisses{};
  const Scalar t = da / (da - db);
  return SegmentPlaneHit<Scalar>{t, s.at(t)};
}

/// Orthonormal tangent pair (t1, t2) with t1 x t2 = n; deterministic in n.
template <typename Scalar>
std::pair<Vector3<Scalar>, Vector3<Scalar>> tangent_frame(const Vector3<Scalar>& n) {
  using std::abs;
  const Vector3<Scalar> seed =
      abs(n.x()) < Scalar(0.6) ? Vector3<Scalar>::UnitX() : (abs(n.y()) < Scalar(0.6) ? Vector3<Scalar>::UnitY()
                                                                                        : Vector3<Scalar>::UnitZ());
  const Vector3<Scalar> t1 = (seed - seed.dot(n) * n).normalized();
  return {t1, n.cross(t1)};
}

/// Angle between two vectors in radians, robust near 0 and pi.
template <typename Scalar>
Scalar angle_between(const Vector3<Scalar>& a, const Vector3<Scalar>& b) {
  using std::atan2;
  return atan2(a.cross(b).norm(), a.dot(b));
}

inline constexpr double kPi = 3.14159265358979323846;
inline double degrees(double radians) { return radians * 180.0 / kPi; }
inline double radians(double degrees) { return degrees * kPi / 180.0; }

/// Axis-aligned box.
struct Box3 {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }
  bool strictly_contains(const Box3& other) const {
    return (other.lo.array() > lo.array()).all() && (other.hi.array() < hi.array()).all();
  }
  Box3 inflated(double r) const { return {lo.array() - r, hi.array() + r}; }
  double diagonal() const { return (hi - lo).norm(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
};

/// Clip the parametric line origin + t*dir, t in [t0, t1], to the box.
/// Returns the clipped interval or nullopt when it misses.
std::optional<std::pair<double, double>> clip_line_to_box(const Vec3& origin, const Vec3& dir, double t0, double t1,
                                                          const Box3& box);

}  // namespace rdt
