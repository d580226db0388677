#pragma once

// Central table of numerical tolerances. Every module reads its thresholds
// from here so that a single edit changes the whole pipeline consistently.

namespace rdt::tol {

/// Unit vectors flagged as unit must have |norm - 1| below this.
inline constexpr double unit_norm = 1e-12;

/// Relative residual for geometric constructions (equidistance, on-plane).
inline constexpr double geometric_relative = 1e-10;

/// On-surface tolerance as a fraction of the bounding-box diagonal.
inline constexpr double on_surface_relative = 1e-9;

/// Transversality threshold for properties E and F. A tangency margin at
/// or below this is reported as indeterminate.
inline constexpr double tangency_margin = 1e-6;

/// Safety factor between a sampling target and the value the generator
/// drives the discrete supremum down to.
inline constexpr double sampling_safety = 0.95;

/// Documented cover constant: every surface point lies within
/// cover_constant * h of some cover point.
inline constexpr double cover_constant = 1.5;

/// Curve tracing step as a fraction of lfs.
inline constexpr double trace_step_lfs = 0.05;

/// Interior seed grid per Voronoi 2-face.
inline constexpr int face_seed_grid = 32;

/// Maximum Newton iterations for projections onto the surface.
inline constexpr int newton_max_iterations = 64;

}  // namespace rdt::tol
