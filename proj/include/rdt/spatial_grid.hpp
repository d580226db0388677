#pragma once

#include <cmath>
#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "rdt/geometry.hpp"

namespace rdt {

/// Uniform hash grid over a growing point set. Nearest-neighbour and range
/// queries; ties are broken toward the smaller id so results are deterministic.
class PointGrid {
 public:
  explicit PointGrid(double cell = 1.0) : cell_(cell) {}

  PointGrid(const std::vector<Vec3>& points, double cell) : cell_(cell) {
    for (std::size_t i = 0; i < points.size(); ++i) insert(static_cast<int>(i), points[i]);
  }

  void insert(int id, const Vec3& p) {
    const Key k = key_of(p);
    buckets_[pack(k)].push_back(id);
    if (static_cast<std::size_t>(id) >= points_.size()) points_.resize(static_cast<std::size_t>(id) + 1);
    points_[static_cast<std::size_t>(id)] = p;
    if (count_ == 0) {
      lo_ = hi_ = k;
    } else {
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], k[a]);
        hi_[a] = std::max(hi_[a], k[a]);
      }
    }
    ++count_;
  }

  std::size_t size() const { return count_; }
  double cell() const { return cell_; }
  const Vec3& point(int id) const { return points_[static_cast<std::size_t>(id)]; }

  /// Index of the nearest stored point, or -1 when empty.
  int nearest(const Vec3& q, double* dist = nullptr) const {
    if (count_ == 0) return -1;
    const Key c = key_of(q);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    int max_ring = 0;
    for (int a = 0; a < 3; ++a) max_ring = std::max({max_ring, std::abs(c[a] - lo_[a]), std::abs(c[a] - hi_[a])});
    for (int ring = 0; ring <= max_ring; ++ring) {
      visit_shell(c, ring, [&](int id) {
        const double d2 = (points_[static_cast<std::size_t>(id)] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
          best_d2 = d2;
          best = id;
        }
      });
      // Points in later shells are at least ring*cell away.
      if (best >= 0 && std::sqrt(best_d2) <= ring * cell_) break;
    }
    if (dist) *dist = std::sqrt(best_d2);
    return best;
  }

  /// Calls f(id, squared_distance) for every stored point within r of q.
  template <typename F>
  void for_each_within(const Vec3& q, double r, F&& f) const {
    if (count_ == 0) return;
    const Key c0 = key_of(q - Vec3::Constant(r));
    const Key c1 = key_of(q + Vec3::Constant(r));
    const double r2 = r * r;
    for (int i = std::max(c0[0], lo_[0]); i <= std::min(c1[0], hi_[0]); ++i)
      for (int j = std::max(c0[1], lo_[1]); j <= std::min(c1[1], hi_[1]); ++j)
        for (int k = std::max(c0[2], lo_[2]); k <= std::min(c1[2], hi_[2]); ++k) {
          auto it = buckets_.find(pack({i, j, k}));
          if (it == buckets_.end()) continue;
          for (int id : it->second) {
            const double d2 = (points_[static_cast<std::size_t>(id)] - q).squaredNorm();
            if (d2 <= r2) f(id, d2);
          }
        }
  }

 private:
  using Key = std::array<int, 3>;

  Key key_of(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x() / cell_)), static_cast<int>(std::floor(p.y() / cell_)),
            static_cast<int>(std::floor(p.z() / cell_))};
  }

  static std::uint64_t pack(const Key& k) {
    constexpr std::uint64_t mask = (1u << 21) - 1;
    return ((static_cast<std::uint64_t>(k[0]) & mask) << 42) | ((static_cast<std::uint64_t>(k[1]) & mask) << 21) |
           (static_cast<std::uint64_t>(k[2]) & mask);
  }

  template <typename F>
  void visit_cell(int i, int j, int k, F& f) const {
    if (i < lo_[0] || i > hi_[0] || j < lo_[1] || j > hi_[1] || k < lo_[2] || k > hi_[2]) return;
    auto it = buckets_.find(pack({i, j, k}));
    if (it == buckets_.end()) return;
    for (int id : it->second) f(id);
  }

  template <typename F>
  void visit_shell(const Key& c, int ring, F&& f) const {
    if (ring == 0) {
      visit_cell(c[0], c[1], c[2], f);
      return;
    }
    for (int di = -ring; di <= ring; ++di)
      for (int dj = -ring; dj <= ring; ++dj) {
        const bool face = std::abs(di) == ring || std::abs(dj) == ring;
        if (face) {
          for (int dk = -ring; dk <= ring; ++dk) visit_cell(c[0] + di, c[1] + dj, c[2] + dk, f);
        } else {
          visit_cell(c[0] + di, c[1] + dj, c[2] - ring, f);
          visit_cell(c[0] + di, c[1] + dj, c[2] + ring, f);
        }
      }
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
  std::vector<Vec3> points_;
  std::size_t count_ = 0;
  Key lo_{0, 0, 0};
  Key hi_{0, 0, 0};
};

}  // namespace rdt

namespace rdt {

/// Static k-d tree for nearest-neighbour queries whose answer may be far away
/// (medial-ball centres, lfs lookups).
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    nodes_.reserve(2 * points_.size() / kLeaf + 2);
    if (!points_.empty()) build(0, static_cast<int>(order_.size()));
  }

  bool empty() const { return points_.empty(); }
  const Vec3& point(int id) const { return points_[static_cast<std::size_t>(id)]; }

  int nearest(const Vec3& q, double* dist = nullptr) const {
    if (points_.empty()) return -1;
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    Vec3 off = Vec3::Zero();
    search(0, q, best, best_d2, 0.0, off, 1.0);
    if (dist) *dist = std::sqrt(best_d2);
    return best;
  }

  /// A point within (1 + rel) of the nearest distance. Much faster when many
  /// points are nearly equidistant from q.
  int nearest_approx(const Vec3& q, double rel, double* dist = nullptr) const {
    if (points_.empty()) return -1;
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const double shrink = 1.0 / ((1.0 + rel) * (1.0 + rel));
    Vec3 off = Vec3::Zero();
    search(0, q, best, best_d2, 0.0, off, shrink);
    if (dist) *dist = std::sqrt(best_d2);
    return best;
  }

 private:
  static constexpr int kLeaf = 8;

  struct Node {
    int begin, end;
    int axis = -1;  // -1 for leaves
    double split = 0;
    int left = -1, right = -1;
  };

  int build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeaf) return id;
    Vec3 lo = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(begin)])], hi = lo;
    for (int i = begin; i < end; ++i) {
      const Vec3& p = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)])];
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, [&](int a, int b) {
      const double pa = points_[static_cast<std::size_t>(a)][axis], pb = points_[static_cast<std::size_t>(b)][axis];
      return pa < pb || (pa == pb && a < b);
    });
    const double split = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(mid)])][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].axis = axis;
    nodes_[static_cast<std::size_t>(id)].split = split;
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  // rd is the squared distance from q to the node's cell, tracked through the
  // per-axis offsets in off.
  void search(int id, const Vec3& q, int& best, double& best_d2, double rd, Vec3& off, double shrink) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.axis < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int pid = order_[static_cast<std::size_t>(i)];
        const double d2 = (points_[static_cast<std::size_t>(pid)] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && pid < best)) {
          best_d2 = d2;
          best = pid;
        }
      }
      return;
    }
    const double diff = q[n.axis] - n.split;
    const int near = diff < 0 ? n.left : n.right;
    const int far = diff < 0 ? n.right : n.left;
    search(near, q, best, best_d2, rd, off, shrink);
    const double old = off[n.axis];
    const double far_rd = rd - old * old + diff * diff;
    if (shrink == 1.0 ? far_rd <= best_d2 : far_rd < shrink * best_d2) {
      off[n.axis] = diff;
      search(far, q, best, best_d2, far_rd, off, shrink);
      off[n.axis] = old;
    }
  }

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace rdt
