#include "rdt/geometry.hpp"

#include <algorithm>
#include <limits>

namespace rdt {

std::optional<std::pair<double, double>> clip_line_to_box(const Vec3& origin, const Vec3& dir, double t0, double t1,
                                                          const Box3& box) {
  for (int axis = 0; axis < 3; ++axis) {
    const double o = origin[axis];
    const double d = dir[axis];
    if (d == 0.0) {
      if (o < box.lo[axis] || o > box.hi[axis]) return std::nullopt;
      continue;
    }
    double ta = (box.lo[axis] - o) / d;
    double tb = (box.hi[axis] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace rdt
