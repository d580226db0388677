#pragma once

#include <array>
#include <map>
#include <vector>

#include "rdt/restricted.hpp"

namespace rdt {

class RdtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Restricted Delaunay triangulation. Vertices are site ids; faces are cyclic
/// site lists oriented by the outward surface normal.
struct RdtMesh {
  std::vector<Vec3> sites;
  std::vector<int> vertices;                // sorted site ids
  std::vector<std::vector<int>> faces;      // three or more sites each
  std::vector<std::array<int, 2>> edges;    // sorted pairs
  std::vector<int> face_source;             // restricted vertex dual to each face, -1 for the oracle

  bool degenerate() const { return faces.empty(); }
  /// Fan triangulation of the polygonal faces.
  std::vector<std::array<int, 3>> triangles() const;
  /// Sorted site triples of all triangles, for set comparison.
  std::vector<std::array<int, 3>> triangle_keys() const;
};

RdtMesh dualize(const RestrictedComplex& rc, const ImplicitSurface& surface);

/// All site triples whose equidistant line meets the surface closer to them
/// than to any other site, found by a dense scan along the clipped line.
/// Cubic cost; intended for at most 50 sites.
RdtMesh brute_force_rdt(const std::vector<Vec3>& sites, const ImplicitSurface& surface);

struct ComponentTopology {
  int surface_component = -1;  // -1 when the mesh component straddles several
  int vertices = 0, edges = 0, faces = 0;
  int euler = 0;
  int expected_euler = 0;
};

struct TopologyReport {
  int vertex_count = 0, edge_count = 0, face_count = 0;
  std::map<int, int> edge_incidence;  // faces per edge -> number of edges
  bool edge_manifold = true;
  bool vertex_manifold = true;
  bool manifold = false;
  bool orientable = false;
  bool coherently_oriented = false;
  int component_count = 0;
  int euler = 0;
  int expected_euler = 0;
  int expected_components = 0;
  std::vector<ComponentTopology> components;
  bool euler_match = false;
  bool component_match = false;
  bool degenerate = false;

  bool homeomorphic() const {
    return !degenerate && manifold && orientable && euler_match && component_match;
  }
};

TopologyReport validate(const RdtMesh& mesh, const ImplicitSurface& surface);

}  // namespace rdt
