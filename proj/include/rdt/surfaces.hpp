#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdt/geometry.hpp"
#include "rdt/spatial_grid.hpp"

namespace rdt {

/// A point of the surface with its outward unit normal.
struct SurfacePoint {
  Vec3 x;
  Vec3 n;

  Plane3d tangent_plane() const { return Plane3d(x, n); }
  Ray3d normal_line() const { return Ray3d(x, n); }
};

/// Smooth closed surface given as the zero set of a scalar field, negative
/// inside. Every catalog field is 1-Lipschitz.
class ImplicitSurface {
 public:
  virtual ~ImplicitSurface() = default;

  virtual std::string name() const = 0;
  virtual std::map<std::string, double> parameters() const = 0;
  virtual double value(const Vec3& p) const = 0;
  virtual Vec3 gradient(const Vec3& p) const = 0;
  virtual Box3 bounding_box() const = 0;

  double lipschitz() const { return 1.0; }
  virtual int component_count() const { return 1; }
  virtual int component_of(const Vec3&) const { return 0; }
  /// Euler characteristic of one connected component.
  virtual int reference_euler(int component) const = 0;
  int reference_euler_total() const;

  /// Exact lfs when the medial axis is known in closed form.
  virtual std::optional<double> analytic_lfs(const Vec3&) const { return std::nullopt; }
  /// Upper bound on lfs over the surface, used to size clip boxes.
  virtual double lfs_upper_bound() const = 0;
  /// Bound K on the Hessian norm of the field where |S| <= 1/K.
  virtual double hessian_bound() const = 0;

  double on_surface_tolerance() const { return tol::on_surface_relative * bounding_box().diagonal(); }
  SurfacePoint at(const Vec3& x) const { return {x, gradient(x).normalized()}; }
};

using SurfacePtr = std::shared_ptr<const ImplicitSurface>;

/// Catalog names: sphere, torus, ellipsoid, two_spheres, blended_spheres.
SurfacePtr make_surface(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> catalog_names();

class SurfaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClosestPointResult {
  SurfacePoint point;
  int iterations = 0;
  bool ambiguous = false;  // query sits on (or numerically at) the medial axis
};

/// Closest point on the surface by Newton projection followed by tangential
/// correction. Throws SurfaceError after tol::newton_max_iterations.
ClosestPointResult closest_point(const ImplicitSurface& surface, const Vec3& p);

/// Newton projection onto the zero set along the gradient (not necessarily closest).
Vec3 project_to_surface(const ImplicitSurface& surface, const Vec3& p);

/// Dense point set on the surface: grid edge roots at spacing 0.866 h, which
/// places every surface point within cover_constant * h of some cover point.
struct SurfaceCover {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  double spacing = 0;
  double constant = tol::cover_constant;
  double radius() const { return constant * spacing; }
};

SurfaceCover dense_cover(const ImplicitSurface& surface, double h);

enum class LfsMode { analytic, numeric };

/// Local feature size provider. Numeric mode approximates the medial axis by
/// the centres of maximal empty balls tangent at the cover points.
class LfsOracle {
 public:
  LfsOracle() = default;

  static LfsOracle analytic(SurfacePtr surface);
  static LfsOracle numeric(SurfacePtr surface, const SurfaceCover& cover);
  /// Analytic when the surface supports it, numeric otherwise.
  static LfsOracle for_surface(SurfacePtr surface, const SurfaceCover& cover);

  bool initialized() const { return static_cast<bool>(surface_); }
  LfsMode mode() const { return mode_; }
  /// Upper bound on |estimate - lfs|; zero for analytic mode.
  double error_bound() const { return error_bound_; }

  double operator()(const Vec3& x) const;
  /// Lower bound on the true lfs (estimate minus the declared error).
  double conservative(const Vec3& x) const;

  const std::vector<Vec3>& medial_points() const { return medial_; }

 private:
  SurfacePtr surface_;
  LfsMode mode_ = LfsMode::analytic;
  double error_bound_ = 0.0;
  std::vector<Vec3> medial_;
  std::shared_ptr<KdTree> medial_tree_;
};

struct LfsBallPair {
  Vec3 inner;  // o = v - lfs(v) n_v
  Vec3 outer;  // o' = v + lfs(v) n_v
  double radius = 0;
};

/// The two lfs-balls tangent at v. Probes emptiness against the cover and
/// throws SurfaceError when a cover point lies inside either open ball.
LfsBallPair lfs_balls(const ImplicitSurface& surface, const LfsOracle& lfs, const SurfacePoint& v,
                      const KdTree& cover_tree);

/// Signed distances of a ball-pair centre set to a plane, used by audits.
inline std::pair<double, double> signed_distances(const LfsBallPair& b, const Plane3d& pl) {
  return {pl.signed_distance(b.inner), pl.signed_distance(b.outer)};
}

}  // namespace rdt
