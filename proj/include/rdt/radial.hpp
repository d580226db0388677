#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdt/restricted.hpp"

namespace rdt {

/// Curve in the restricted cell of `site` from the site to the cell boundary
/// whose projection onto the tangent plane at the site is the ray at angle theta.
struct RadialPath {
  int site = -1;
  double theta = 0;
  std::vector<Vec3> points;  // starts at the site, ends at `end`
  Vec3 end = Vec3::Zero();
  int exit_neighbor = -1;         // site across the boundary at `end`
  double projected_length = 0;    // |v phi(end)|
  bool reached_boundary = false;
  bool monotone = true;           // projected parameter strictly increasing
  double max_curvature = 0;
  std::string failure;            // empty when the trace succeeded
};

/// Tangent frame at a site: normal and two tangent directions, theta measured from t1.
struct SiteFrame {
  Vec3 v, n, t1, t2;
  Vec3 direction(double theta) const;
};
SiteFrame site_frame(const ImplicitSurface& surface, const Vec3& site);

RadialPath trace_radial_path(const RestrictedComplex& rc, int site, const ImplicitSurface& surface,
                             const LfsOracle& lfs, double theta);

struct StarShapeFailure {
  double theta = 0;
  std::string what;
  Vec3 point = Vec3::Zero();
};

struct StarShapeResult {
  int site = -1;
  bool pass = true;
  bool advisory = false;           // cell ratio not below xi; the audit is informational
  double ratio = 0;
  std::vector<double> thetas;
  std::vector<double> profile;     // l(theta)
  double max_jump = 0;             // largest |l(theta_i+1) - l(theta_i)| on the grid
  double jump_tolerance = 0;
  int refinements = 0;             // grid pairs resolved by angular bisection
  int cover_points_checked = 0;
  std::vector<StarShapeFailure> failures;
};

/// Radial paths on a grid of angular step dtheta (radians): existence,
/// monotonicity, uniqueness against the cell's cover points, and continuity of l.
StarShapeResult star_shape_audit(const RestrictedComplex& rc, int site, const ImplicitSurface& surface,
                                 const LfsOracle& lfs, const CoverContext& cover, double dtheta);

}  // namespace rdt
