#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rdt/surfaces.hpp"
#include "rdt/tolerances.hpp"
#include "rdt/voronoi.hpp"

namespace rdt {

class RestrictedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cover points with the spatial indexes the restricted complex needs.
/// Expensive to build and reusable across site sets on one surface.
struct CoverContext {
  SurfaceCover cover;
  std::vector<int> component;  // surface component of every cover point
  std::shared_ptr<PointGrid> grid;

  double flood_radius() const { return 2 * cover.radius(); }
};

CoverContext make_cover_context(const ImplicitSurface& surface, double h);

/// Sigma intersected with a Voronoi edge.
struct RestrictedVertex {
  Vec3 position;
  int edge = -1;
  std::vector<int> sites;
  double tangency_margin = 0;  // |n . direction of the edge line|
  bool near_voronoi_vertex = false;
};

/// Per Voronoi edge root report.
struct EdgeRoots {
  std::vector<int> vertices;
  bool grazing = false;  // |S| dips to tolerance without a sign change
  Vec3 grazing_point = Vec3::Zero();
};

/// One connected component of Sigma intersected with a 2-face.
struct RestrictedEdge {
  int face = -1;
  std::vector<Vec3> polyline;
  int start = -1;  // restricted vertex ids; -1 for loops
  int end = -1;
  bool closed = false;
  bool from_seed = false;  // found by the interior seed scan rather than from a boundary vertex
  double length = 0;
  double min_margin = 1;  // min over the polyline of |n x plane normal|
};

struct RestrictedCell {
  int site = -1;
  std::vector<int> edges;        // restricted edges on its boundary
  std::vector<int> cover_points; // cover points whose nearest site is this one
  int boundary_loops = 0;
  bool boundary_closed = true;   // every boundary vertex has degree two
  int components = 0;            // cover-point components after rescue
  double max_distance = 0;       // max |vx| over the cell's cover points
  Vec3 farthest = Vec3::Zero();
  double lfs = 0;                // lfs at the site
  double ratio() const { return lfs > 0 ? max_distance / lfs : 0; }
  bool empty() const { return cover_points.empty() && edges.empty(); }
};

struct FaceTrace {
  std::vector<int> edges;
  int unmatched_exits = 0;
};

/// Sigma restricted to a Voronoi diagram.
class RestrictedComplex {
 public:
  const VoronoiComplex& voronoi() const { return voronoi_; }
  const std::vector<RestrictedVertex>& vertices() const { return vertices_; }
  const std::vector<EdgeRoots>& edge_roots() const { return edge_roots_; }
  const std::vector<RestrictedEdge>& edges() const { return edges_; }
  const std::vector<FaceTrace>& faces() const { return faces_; }
  const std::vector<RestrictedCell>& cells() const { return cells_; }

  /// Voronoi vertices within tolerance of Sigma, treated as inside.
  const std::vector<int>& vertices_on_surface() const { return vertices_on_surface_; }
  /// Cover points equidistant (within tolerance) from two sites.
  int ambiguous_cover_points() const { return ambiguous_cover_points_; }
  /// Genus sum implied by the cell decomposition of each surface component.
  const std::vector<int>& handle_count() const { return handles_; }
  double cover_spacing() const { return cover_spacing_; }

 private:
  friend RestrictedComplex restrict_to_surface(const VoronoiComplex&, const ImplicitSurface&, const LfsOracle&,
                                               const CoverContext&);
  friend void restricted_vertices(RestrictedComplex&, const ImplicitSurface&);
  friend void trace_restricted_edges(RestrictedComplex&, const ImplicitSurface&, const LfsOracle&);
  friend void assemble_cells(RestrictedComplex&, const ImplicitSurface&, const LfsOracle&, const CoverContext&);

  VoronoiComplex voronoi_;
  std::vector<RestrictedVertex> vertices_;
  std::vector<EdgeRoots> edge_roots_;
  std::vector<RestrictedEdge> edges_;
  std::vector<FaceTrace> faces_;
  std::vector<RestrictedCell> cells_;
  std::vector<int> vertices_on_surface_;
  std::vector<double> vertex_field_;
  int ambiguous_cover_points_ = 0;
  std::vector<int> handles_;
  double cover_spacing_ = 0;
};

/// Full construction: roots on edges, traced faces, assembled cells.
RestrictedComplex restrict_to_surface(const VoronoiComplex& voronoi, const ImplicitSurface& surface,
                                      const LfsOracle& lfs, const CoverContext& cover);

/// Stages of restrict_to_surface, exposed for testing.
void restricted_vertices(RestrictedComplex& rc, const ImplicitSurface& surface);
void trace_restricted_edges(RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs);
void assemble_cells(RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs,
                    const CoverContext& cover);

/// Roots of the field on a segment, by Lipschitz exclusion, monotonicity
/// certification, and bisection. Values at the endpoints may be overridden.
struct SegmentRoots {
  std::vector<Vec3> roots;
  bool grazing = false;
  Vec3 grazing_point = Vec3::Zero();
};
SegmentRoots segment_roots(const ImplicitSurface& surface, const Vec3& a, const Vec3& b,
                           std::optional<double> value_a = std::nullopt, std::optional<double> value_b = std::nullopt);

enum class Verdict { pass, fail, indeterminate };
const char* to_string(Verdict v);

struct Witness {
  std::string property;
  std::string what;
  int id = -1;
  Vec3 point = Vec3::Zero();
  double value = 0;
};

/// Closed-ball properties A-D and generic intersection properties E-F.
struct PropertyReport {
  bool A = true, B = true, C = true, D = true;
  Verdict E = Verdict::pass, F = Verdict::pass;
  double min_face_margin = 1;  // E margin
  double min_edge_margin = 1;  // F margin
  int nonempty_cells = 0;
  int nonempty_faces = 0;
  int restricted_vertex_count = 0;
  int symbolic_vertices = 0;  // Voronoi vertices resolved as inside by the D rule
  std::vector<Witness> witnesses;

  bool all_pass() const { return A && B && C && D && E == Verdict::pass && F == Verdict::pass; }
};

PropertyReport check_properties(const RestrictedComplex& rc, const ImplicitSurface& surface);

}  // namespace rdt
