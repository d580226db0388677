#include "rdt/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace rdt {
namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

class Sphere final : public ImplicitSurface {
 public:
  Sphere(Vec3 c, double r) : c_(c), r_(r) {
    if (!(r > 0)) throw SurfaceError("sphere: radius must be positive");
  }
  std::string name() const override { return "sphere"; }
  std::map<std::string, double> parameters() const override {
    return {{"radius", r_}, {"cx", c_.x()}, {"cy", c_.y()}, {"cz", c_.z()}};
  }
  double value(const Vec3& p) const override { return (p - c_).norm() - r_; }
  Vec3 gradient(const Vec3& p) const override {
    const Vec3 d = p - c_;
    const double n = d.norm();
    return n > 0 ? Vec3(d / n) : Vec3::Zero();
  }
  Box3 bounding_box() const override { return {c_.array() - r_, c_.array() + r_}; }
  int reference_euler(int) const override { return 2; }
  std::optional<double> analytic_lfs(const Vec3&) const override { return r_; }
  double lfs_upper_bound() const override { return r_; }
  double hessian_bound() const override { return 2 / r_; }

 private:
  Vec3 c_;
  double r_;
};

// Distance field of the torus around the z axis.
class Torus final : public ImplicitSurface {
 public:
  Torus(double R, double r) : R_(R), r_(r) {
    if (!(r > 0) || !(R > r)) throw SurfaceError("torus: need R > r > 0");
  }
  std::string name() const override { return "torus"; }
  std::map<std::string, double> parameters() const override { return {{"R", R_}, {"r", r_}}; }
  double value(const Vec3& p) const override {
    const double q = std::hypot(p.x(), p.y()) - R_;
    return std::hypot(q, p.z()) - r_;
  }
  Vec3 gradient(const Vec3& p) const override {
    const double rho = std::hypot(p.x(), p.y());
    if (rho == 0) return Vec3::Zero();
    const double q = rho - R_;
    const double d = std::hypot(q, p.z());
    if (d == 0) return Vec3::Zero();
    return Vec3(q * p.x() / (rho * d), q * p.y() / (rho * d), p.z() / d);
  }
  Box3 bounding_box() const override { return {Vec3(-R_ - r_, -R_ - r_, -r_), Vec3(R_ + r_, R_ + r_, r_)}; }
  int reference_euler(int) const override { return 0; }
  // Medial axis = core circle (distance r) plus the z axis (distance rho >= R - r).
  std::optional<double> analytic_lfs(const Vec3& x) const override {
    return std::min(r_, std::hypot(x.x(), x.y()));
  }
  double lfs_upper_bound() const override { return r_; }
  double hessian_bound() const override { return 2 / r_ + 2 / (R_ - r_); }

 private:
  double R_, r_;
};

// Axis-aligned ellipsoid; the field is scaled so it is 1-Lipschitz.
class Ellipsoid final : public ImplicitSurface {
 public:
  explicit Ellipsoid(Vec3 axes) : a_(axes), amin_(axes.minCoeff()) {
    if (!(amin_ > 0)) throw SurfaceError("ellipsoid: semi-axes must be positive");
  }
  std::string name() const override { return "ellipsoid"; }
  std::map<std::string, double> parameters() const override { return {{"a", a_.x()}, {"b", a_.y()}, {"c", a_.z()}}; }
  double value(const Vec3& p) const override { return amin_ * (p.cwiseQuotient(a_).norm() - 1.0); }
  Vec3 gradient(const Vec3& p) const override {
    const Vec3 q = p.cwiseQuotient(a_);
    const double n = q.norm();
    if (n == 0) return Vec3::Zero();
    return amin_ * q.cwiseQuotient(a_) / n;
  }
  Box3 bounding_box() const override { return {-a_, a_}; }
  int reference_euler(int) const override { return 2; }
  double lfs_upper_bound() const override { return a_.maxCoeff() * a_.maxCoeff() / amin_; }
  double hessian_bound() const override {
    const double k = a_.maxCoeff() / amin_;
    return 4 * k * k / amin_;
  }

 private:
  Vec3 a_;
  double amin_;
};

// Union of two disjoint balls centred at (+-d, 0, 0); distance to the union.
class TwoSpheres final : public ImplicitSurface {
 public:
  TwoSpheres(double d, double r) : d_(d), r_(r) {
    if (!(r > 0) || !(d > r)) throw SurfaceError("two_spheres: need offset > radius > 0");
  }
  std::string name() const override { return "two_spheres"; }
  std::map<std::string, double> parameters() const override { return {{"offset", d_}, {"radius", r_}}; }
  double value(const Vec3& p) const override {
    return std::min((p - Vec3(-d_, 0, 0)).norm(), (p - Vec3(d_, 0, 0)).norm()) - r_;
  }
  Vec3 gradient(const Vec3& p) const override {
    const Vec3 c = p.x() < 0 ? Vec3(-d_, 0, 0) : Vec3(d_, 0, 0);
    const Vec3 v = p - c;
    const double n = v.norm();
    return n > 0 ? Vec3(v / n) : Vec3::Zero();
  }
  Box3 bounding_box() const override { return {Vec3(-d_ - r_, -r_, -r_), Vec3(d_ + r_, r_, r_)}; }
  int component_count() const override { return 2; }
  int component_of(const Vec3& p) const override { return p.x() < 0 ? 0 : 1; }
  int reference_euler(int) const override { return 2; }
  // Medial axis = the two centres plus the bisecting plane x = 0.
  std::optional<double> analytic_lfs(const Vec3& x) const override { return std::min(r_, std::abs(x.x())); }
  double lfs_upper_bound() const override { return r_; }
  double hessian_bound() const override { return std::max(2 / r_, 2 / (d_ - r_)); }

 private:
  double d_, r_;
};

// Polynomial smooth union of two overlapping spheres. Only C^{1,1} across the
// blend boundary.
class BlendedSpheres final : public ImplicitSurface {
 public:
  BlendedSpheres(double d, double r, double k) : d_(d), r_(r), k_(k) {
    if (!(r > 0) || !(k > 0) || !(d >= 0)) throw SurfaceError("blended_spheres: bad parameters");
  }
  std::string name() const override { return "blended_spheres"; }
  std::map<std::string, double> parameters() const override {
    return {{"offset", d_}, {"radius", r_}, {"blend", k_}};
  }
  double value(const Vec3& p) const override {
    const double a = (p - Vec3(-d_, 0, 0)).norm() - r_;
    const double b = (p - Vec3(d_, 0, 0)).norm() - r_;
    const double h = std::clamp(0.5 + 0.5 * (b - a) / k_, 0.0, 1.0);
    return h * a + (1 - h) * b - k_ * h * (1 - h);
  }
  Vec3 gradient(const Vec3& p) const override {
    const Vec3 va = p - Vec3(-d_, 0, 0);
    const Vec3 vb = p - Vec3(d_, 0, 0);
    const double na = va.norm(), nb = vb.norm();
    const double a = na - r_, b = nb - r_;
    const double h = std::clamp(0.5 + 0.5 * (b - a) / k_, 0.0, 1.0);
    const Vec3 ga = na > 0 ? Vec3(va / na) : Vec3::Zero();
    const Vec3 gb = nb > 0 ? Vec3(vb / nb) : Vec3::Zero();
    return h * ga + (1 - h) * gb;
  }
  Box3 bounding_box() const override {
    const double e = r_ + 0.25 * k_;
    return {Vec3(-d_ - e, -e, -e), Vec3(d_ + e, e, e)};
  }
  int reference_euler(int) const override { return 2; }
  double lfs_upper_bound() const override { return r_ + d_; }
  double hessian_bound() const override { return 2 / r_ + 2 / k_; }

 private:
  double d_, r_, k_;
};

}  // namespace

int ImplicitSurface::reference_euler_total() const {
  int chi = 0;
  for (int c = 0; c < component_count(); ++c) chi += reference_euler(c);
  return chi;
}

std::vector<std::string> catalog_names() {
  return {"sphere", "torus", "ellipsoid", "two_spheres", "blended_spheres"};
}

SurfacePtr make_surface(const std::string& name, const std::map<std::string, double>& p) {
  if (name == "sphere") {
    return std::make_shared<Sphere>(Vec3(param(p, "cx", 0), param(p, "cy", 0), param(p, "cz", 0)),
                                    param(p, "radius", 1.0));
  }
  if (name == "torus") return std::make_shared<Torus>(param(p, "R", 2.0), param(p, "r", 0.5));
  if (name == "ellipsoid") {
    return std::make_shared<Ellipsoid>(Vec3(param(p, "a", 1.2), param(p, "b", 1.0), param(p, "c", 0.8)));
  }
  if (name == "two_spheres") return std::make_shared<TwoSpheres>(param(p, "offset", 1.75), param(p, "radius", 1.0));
  if (name == "blended_spheres") {
    return std::make_shared<BlendedSpheres>(param(p, "offset", 0.8), param(p, "radius", 1.0), param(p, "blend", 0.3));
  }
  std::string names;
  for (const auto& n : catalog_names()) names += (names.empty() ? "" : ", ") + n;
  throw SurfaceError("unknown surface '" + name + "' (catalog: " + names + ")");
}

Vec3 project_to_surface(const ImplicitSurface& surface, const Vec3& p) {
  const double tol = surface.on_surface_tolerance();
  Vec3 x = p;
  for (int it = 0; it < tol::newton_max_iterations; ++it) {
    const double s = surface.value(x);
    if (std::abs(s) <= 1e-3 * tol) return x;
    const Vec3 g = surface.gradient(x);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-24) break;
    x -= (s / g2) * g;
  }
  if (std::abs(surface.value(x)) <= tol) return x;
  throw SurfaceError("projection did not converge near (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                     ", " + std::to_string(x.z()) + ")");
}

namespace {

Eigen::Matrix3d numeric_hessian(const ImplicitSurface& surface, const Vec3& x, double step) {
  Eigen::Matrix3d h;
  for (int a = 0; a < 3; ++a) {
    const Vec3 e = step * Vec3::Unit(a);
    h.col(a) = (surface.gradient(x + e) - surface.gradient(x - e)) / (2 * step);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace

ClosestPointResult closest_point(const ImplicitSurface& surface, const Vec3& p) {
  ClosestPointResult out;
  Vec3 start = p;
  if (surface.gradient(p).norm() < 1e-9) {
    out.ambiguous = true;
    start = p + 1e-6 * surface.bounding_box().diagonal() * Vec3::UnitX();
  }
  const double scale = surface.bounding_box().diagonal();
  const double tol = 1e-12 * scale;
  Vec3 x = project_to_surface(surface, start);
  auto tangential_residual = [&](const Vec3& y) {
    const Vec3 n = surface.gradient(y).normalized();
    const Vec3 r = p - y;
    return Vec3(r - r.dot(n) * n);
  };

  // Newton on the Lagrange system x - p + lambda grad S(x) = 0, S(x) = 0, with
  // a projected-tangent step whenever Newton fails to reduce the residual.
  for (int it = 0; it < tol::newton_max_iterations; ++it) {
    out.iterations = it + 1;
    const Vec3 t = tangential_residual(x);
    if (t.norm() <= tol) {
      out.point = {x, surface.gradient(x).normalized()};
      return out;
    }
    const Vec3 g = surface.gradient(x);
    const double lambda = (p - x).dot(g) / g.squaredNorm();
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + lambda * numeric_hessian(surface, x, 1e-6 * scale);
    J.block<3, 1>(0, 3) = g;
    J.block<1, 3>(3, 0) = g.transpose();
    Eigen::Vector4d F;
    F.head<3>() = x - p + lambda * g;
    F(3) = surface.value(x);
    const Eigen::Vector4d delta = J.fullPivLu().solve(-F);
    Vec3 candidate = x + delta.head<3>();
    bool accepted = false;
    if (delta.allFinite()) {
      try {
        candidate = project_to_surface(surface, candidate);
        accepted = tangential_residual(candidate).norm() < t.norm();
      } catch (const SurfaceError&) {
      }
    }
    if (!accepted) {
      double alpha = 1.0;
      const double d0 = (x - p).norm();
      for (int k = 0; k < 30; ++k, alpha *= 0.5) {
        candidate = project_to_surface(surface, x + alpha * t);
        if ((candidate - p).norm() < d0) break;
      }
    }
    x = candidate;
  }
  throw SurfaceError("closest_point: did not converge; last iterate (" + std::to_string(x.x()) + ", " +
                     std::to_string(x.y()) + ", " + std::to_string(x.z()) + ")");
}

SurfaceCover dense_cover(const ImplicitSurface& surface, double h) {
  if (!(h > 0)) throw SurfaceError("dense_cover: spacing must be positive");
  const Box3 box = surface.bounding_box();
  for (double g = h * std::sqrt(3.0) / 2.0;; g *= 0.5) {
    SurfaceCover cover;
    cover.spacing = h;
    const Vec3 lo = box.lo.array() - 0.5 * g;
    std::array<int, 3> n{};
    for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::ceil((box.hi[a] + 0.5 * g - lo[a]) / g)) + 1;
    auto node = [&](int i, int j, int k) { return Vec3(lo.x() + i * g, lo.y() + j * g, lo.z() + k * g); };

    const std::size_t slab = static_cast<std::size_t>(n[0]) * n[1];
    std::vector<double> cur(slab), next(slab);
    auto fill = [&](std::vector<double>& s, int k) {
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) s[static_cast<std::size_t>(j) * n[0] + i] = surface.value(node(i, j, k));
    };
    auto root = [&](Vec3 a, Vec3 b, double fa) {
      const bool ina = fa < 0;
      for (int it = 0; it < 60; ++it) {
        const Vec3 m = 0.5 * (a + b);
        if (m == a || m == b) break;
        if ((surface.value(m) < 0) == ina) a = m;
        else b = m;
      }
      const Vec3 x = 0.5 * (a + b);
      cover.points.push_back(x);
      cover.normals.push_back(surface.gradient(x).normalized());
    };

    fill(cur, 0);
    for (int k = 0; k < n[2]; ++k) {
      if (k + 1 < n[2]) fill(next, k + 1);
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) {
          const double f = cur[static_cast<std::size_t>(j) * n[0] + i];
          const Vec3 p = node(i, j, k);
          const bool in = f < 0;
          if (i + 1 < n[0] && (cur[static_cast<std::size_t>(j) * n[0] + i + 1] < 0) != in) root(p, node(i + 1, j, k), f);
          if (j + 1 < n[1] && (cur[static_cast<std::size_t>(j + 1) * n[0] + i] < 0) != in) root(p, node(i, j + 1, k), f);
          if (k + 1 < n[2] && (next[static_cast<std::size_t>(j) * n[0] + i] < 0) != in) root(p, node(i, j, k + 1), f);
        }
      std::swap(cur, next);
    }
    if (!cover.points.empty()) return cover;
  }
}

LfsOracle LfsOracle::analytic(SurfacePtr surface) {
  if (!surface->analytic_lfs(surface->bounding_box().center())) {
    throw SurfaceError("no analytic lfs for surface '" + surface->name() + "'");
  }
  LfsOracle o;
  o.surface_ = std::move(surface);
  o.mode_ = LfsMode::analytic;
  return o;
}

LfsOracle LfsOracle::numeric(SurfacePtr surface, const SurfaceCover& cover) {
  LfsOracle o;
  o.mode_ = LfsMode::numeric;
  // Balls wider than twice the lfs bound never realise an lfs value.
  const double limit = 2.0 * surface->lfs_upper_bound();
  const double scale = surface->bounding_box().diagonal();
  constexpr double rel = 1e-3;
  o.error_bound_ = 2.0 * cover.radius() + 2 * rel * limit;
  const KdTree tree(cover.points);
  const double quantum = 1e-9 * scale;
  auto key = [quantum](const Vec3& c) {
    return std::array<long long, 3>{std::llround(c.x() / quantum), std::llround(c.y() / quantum),
                                    std::llround(c.z() / quantum)};
  };
  // Many tangent balls share a centre (spherical patches); their queries repeat.
  std::map<std::array<long long, 3>, std::pair<int, double>> memo;
  auto nearest = [&](const Vec3& c, double* d) {
    const auto k = key(c);
    auto it = memo.find(k);
    if (it == memo.end()) {
      double dd = 0;
      const int q = tree.nearest_approx(c, rel, &dd);
      it = memo.emplace(k, std::make_pair(q, dd)).first;
    }
    *d = it->second.second;
    return it->second.first;
  };
  // Distance along the line to the next crossing of the surface, by sphere tracing.
  auto chord = [&](const Vec3& p, const Vec3& dir) {
    double t = 1e-6 * scale;
    for (int it = 0; it < 400 && t < limit; ++it) {
      const double v = std::abs(surface->value(p + t * dir));
      if (v < 1e-9 * scale) return t;
      t += v;
    }
    return std::numeric_limits<double>::infinity();
  };
  std::set<std::array<long long, 3>> seen;
  for (std::size_t i = 0; i < cover.points.size(); ++i) {
    const Vec3& p = cover.points[i];
    const Vec3& n = cover.normals[i];
    for (double side : {-1.0, 1.0}) {
      // Shrink the tangent ball at p until no cover point lies inside it. It
      // cannot contain the next crossing along the normal.
      double r = std::min(limit, 0.5 * chord(p, side * n) * (1 + 1e-9));
      bool bounded = r < limit;
      for (int it = 0; it < 100; ++it) {
        const Vec3 c = p + side * r * n;
        double d = 0;
        const int q = nearest(c, &d);
        if (q == static_cast<int>(i) || d >= r * (1.0 - rel)) break;
        const Vec3 pq = cover.points[static_cast<std::size_t>(q)] - p;
        const double depth = side * pq.dot(n);
        if (depth <= 0) break;
        r = pq.squaredNorm() / (2.0 * depth);
        bounded = true;
      }
      if (bounded) {
        const Vec3 m = p + side * r * n;
        if (seen.insert(key(m)).second) o.medial_.push_back(m);
      }
    }
  }
  if (o.medial_.empty()) throw SurfaceError("numeric lfs: no medial points found");
  o.medial_tree_ = std::make_shared<KdTree>(o.medial_);
  o.surface_ = std::move(surface);
  return o;
}

LfsOracle LfsOracle::for_surface(SurfacePtr surface, const SurfaceCover& cover) {
  if (surface->analytic_lfs(surface->bounding_box().center())) return analytic(std::move(surface));
  return numeric(std::move(surface), cover);
}

double LfsOracle::operator()(const Vec3& x) const {
  if (!surface_) throw SurfaceError("lfs oracle not initialized");
  if (mode_ == LfsMode::analytic) return *surface_->analytic_lfs(x);
  double d = 0;
  medial_tree_->nearest(x, &d);
  return d;
}

double LfsOracle::conservative(const Vec3& x) const {
  const double v = (*this)(x);
  return std::max(v - error_bound_, 0.5 * v);
}

LfsBallPair lfs_balls(const ImplicitSurface& surface, const LfsOracle& lfs, const SurfacePoint& v,
                      const KdTree& cover_tree) {
  LfsBallPair b;
  b.radius = lfs(v.x);
  b.inner = v.x - b.radius * v.n;
  b.outer = v.x + b.radius * v.n;
  const double tol = lfs.error_bound() + 1e3 * surface.on_surface_tolerance();
  for (const Vec3& c : {b.inner, b.outer}) {
    double d = 0;
    cover_tree.nearest(c, &d);
    if (d < b.radius - tol) {
      throw SurfaceError("lfs ball at (" + std::to_string(v.x.x()) + ", " + std::to_string(v.x.y()) + ", " +
                         std::to_string(v.x.z()) + ") is not empty: probe distance " + std::to_string(d) +
                         " < radius " + std::to_string(b.radius));
    }
  }
  return b;
}

}  // namespace rdt
