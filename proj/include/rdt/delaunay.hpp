#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rdt/geometry.hpp"

namespace rdt {

class DelaunayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kInfinite = -1;

/// Positively oriented tetrahedron. nbr[i] is the tetrahedron across the face
/// opposite v[i]. At most one vertex is kInfinite; for such a tetrahedron,
/// substituting a point x for the infinite vertex gives orient3d > 0 exactly
/// when x lies strictly beyond the hull facet.
struct Tetrahedron {
  std::array<int, 4> v{};
  std::array<int, 4> nbr{-1, -1, -1, -1};

  bool infinite() const { return v[0] < 0 || v[1] < 0 || v[2] < 0 || v[3] < 0; }
  int slot_of(int vertex) const {
    for (int i = 0; i < 4; ++i)
      if (v[i] == vertex) return i;
    return -1;
  }
};

struct DelaunayOptions {
  /// Insert in a seeded random order instead of input order. The result is
  /// the same complex; only the construction path changes.
  std::optional<std::uint64_t> shuffle_seed;
};

class DelaunayComplex {
 public:
  const std::vector<Vec3>& sites() const { return sites_; }
  const std::vector<Tetrahedron>& tetrahedra() const { return tets_; }
  std::size_t finite_count() const;

  /// Sorted Delaunay neighbours of every site.
  const std::vector<std::vector<int>>& neighbors() const { return neighbors_; }

  /// Number of empty-sphere decisions settled by the symbolic perturbation.
  std::int64_t perturbed_decisions() const { return perturbed_; }

  /// Boundary (hull) triangles, each as the finite vertices of an infinite cell.
  std::vector<std::array<int, 3>> hull_triangles() const;

 private:
  friend DelaunayComplex build_delaunay(const std::vector<Vec3>&, const DelaunayOptions&);
  std::vector<Vec3> sites_;
  std::vector<Tetrahedron> tets_;
  std::vector<std::vector<int>> neighbors_;
  std::int64_t perturbed_ = 0;
};

/// Incremental Bowyer-Watson construction in input order. Ties are broken by
/// the index-keyed symbolic perturbation. Throws DelaunayError for fewer than
/// four sites, duplicate sites, or coplanar input (use the 2D module).
DelaunayComplex build_delaunay(const std::vector<Vec3>& sites, const DelaunayOptions& options = {});

}  // namespace rdt
