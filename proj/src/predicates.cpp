#include "rdt/predicates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

namespace rdt::predicates {
namespace {

// Floating-point expansion arithmetic: a value is the exact sum of
// non-overlapping doubles stored in increasing magnitude, zeros removed.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double a) {
    if (a != 0.0) terms_.push_back(a);
  }

  static Expansion difference(double a, double b) {
    const double x = a - b;
    const double bvirt = a - x;
    const double avirt = x + bvirt;
    const double bround = bvirt - b;
    const double around = a - avirt;
    const double y = around + bround;
    Expansion e;
    if (y != 0.0) e.terms_.push_back(y);
    if (x != 0.0) e.terms_.push_back(x);
    return e;
  }

  friend Expansion operator+(const Expansion& e, const Expansion& f) {
    Expansion out = e;
    for (double b : f.terms_) out.grow(b);
    return out;
  }

  friend Expansion operator-(const Expansion& e) {
    Expansion out = e;
    for (double& t : out.terms_) t = -t;
    return out;
  }

  friend Expansion operator-(const Expansion& e, const Expansion& f) { return e + (-f); }

  friend Expansion operator*(const Expansion& e, const Expansion& f) {
    Expansion out;
    for (double b : f.terms_) out = out + e.scaled(b);
    return out;
  }

  int sign() const {
    if (terms_.empty()) return 0;
    return terms_.back() > 0.0 ? 1 : -1;
  }

 private:
  static void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bvirt = x - a;
    const double avirt = x - bvirt;
    const double bround = b - bvirt;
    const double around = a - avirt;
    y = around + bround;
  }

  static void fast_two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    const double bvirt = x - a;
    y = b - bvirt;
  }

  static void two_product(double a, double b, double& x, double& y) {
    x = a * b;
    y = std::fma(a, b, -x);
  }

  void grow(double b) {
    std::vector<double> h;
    h.reserve(terms_.size() + 1);
    double q = b;
    for (double e : terms_) {
      double sum, err;
      two_sum(q, e, sum, err);
      if (err != 0.0) h.push_back(err);
      q = sum;
    }
    if (q != 0.0) h.push_back(q);
    terms_ = std::move(h);
  }

  Expansion scaled(double b) const {
    Expansion out;
    if (terms_.empty() || b == 0.0) return out;
    std::vector<double>& h = out.terms_;
    h.reserve(2 * terms_.size());
    double q, hh;
    two_product(terms_[0], b, q, hh);
    if (hh != 0.0) h.push_back(hh);
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      double p1, p0, sum;
      two_product(terms_[i], b, p1, p0);
      two_sum(q, p0, sum, hh);
      if (hh != 0.0) h.push_back(hh);
      fast_two_sum(p1, sum, q, hh);
      if (hh != 0.0) h.push_back(hh);
    }
    if (q != 0.0) h.push_back(q);
    return out;
  }

  std::vector<double> terms_;
};

constexpr double kEpsilon = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwErrBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
constexpr double kO3dErrBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
constexpr double kIspErrBound = (16.0 + 224.0 * kEpsilon) * kEpsilon;

std::atomic<long long> g_orient_exact{0};
std::atomic<long long> g_insphere_exact{0};

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Expansion acx = Expansion::difference(a.x(), c.x());
  const Expansion bcx = Expansion::difference(b.x(), c.x());
  const Expansion acy = Expansion::difference(a.y(), c.y());
  const Expansion bcy = Expansion::difference(b.y(), c.y());
  return (acx * bcy - acy * bcx).sign();
}

// Sign of det[a-d; b-d; c-d].
int orient3d_reference_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Expansion adx = Expansion::difference(a.x(), d.x()), ady = Expansion::difference(a.y(), d.y()),
                  adz = Expansion::difference(a.z(), d.z());
  const Expansion bdx = Expansion::difference(b.x(), d.x()), bdy = Expansion::difference(b.y(), d.y()),
                  bdz = Expansion::difference(b.z(), d.z());
  const Expansion cdx = Expansion::difference(c.x(), d.x()), cdy = Expansion::difference(c.y(), d.y()),
                  cdz = Expansion::difference(c.z(), d.z());
  const Expansion det = adz * (bdx * cdy - cdx * bdy) + bdz * (cdx * ady - adx * cdy) + cdz * (adx * bdy - bdx * ady);
  return det.sign();
}

// Sign of the lifted 4x4 determinant with e as reference point.
int insphere_reference_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  auto diff = [&](const Vec3& p) {
    return std::array<Expansion, 3>{Expansion::difference(p.x(), e.x()), Expansion::difference(p.y(), e.y()),
                                    Expansion::difference(p.z(), e.z())};
  };
  const auto [aex, aey, aez] = diff(a);
  const auto [bex, bey, bez] = diff(b);
  const auto [cex, cey, cez] = diff(c);
  const auto [dex, dey, dez] = diff(d);

  const Expansion ab = aex * bey - bex * aey;
  const Expansion bc = bex * cey - cex * bey;
  const Expansion cd = cex * dey - dex * cey;
  const Expansion da = dex * aey - aex * dey;
  const Expansion ac = aex * cey - cex * aey;
  const Expansion bd = bex * dey - dex * bey;

  const Expansion abc = aez * bc - bez * ac + cez * ab;
  const Expansion bcd = bez * cd - cez * bd + dez * bc;
  const Expansion cda = cez * da + dez * ac + aez * cd;
  const Expansion dab = dez * ab + aez * bd + bez * da;

  const Expansion alift = aex * aex + aey * aey + aez * aez;
  const Expansion blift = bex * bex + bey * bey + bez * bez;
  const Expansion clift = cex * cex + cey * cey + cez * cez;
  const Expansion dlift = dex * dex + dey * dey + dez * dez;

  return ((dlift * abc - clift * dab) + (blift * cda - alift * bcd)).sign();
}

int orient2d_raw(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detleft = (a.x() - c.x()) * (b.y() - c.y());
  const double detright = (a.y() - c.y()) * (b.x() - c.x());
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > kCcwErrBound * detsum) return sign_of(det);
  return orient2d_exact(a, b, c);
}

int orient3d_reference(const Vec3& pa, const Vec3& pb, const Vec3& pc, const Vec3& pd) {
  const double adx = pa.x() - pd.x(), bdx = pb.x() - pd.x(), cdx = pc.x() - pd.x();
  const double ady = pa.y() - pd.y(), bdy = pb.y() - pd.y(), cdy = pc.y() - pd.y();
  const double adz = pa.z() - pd.z(), bdz = pb.z() - pd.z(), cdz = pc.z() - pd.z();

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;

  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                           (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                           (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  if (std::abs(det) > kO3dErrBound * permanent) return sign_of(det);
  g_orient_exact.fetch_add(1, std::memory_order_relaxed);
  return orient3d_reference_exact(pa, pb, pc, pd);
}

int insphere_reference(const Vec3& pa, const Vec3& pb, const Vec3& pc, const Vec3& pd, const Vec3& pe) {
  const double aex = pa.x() - pe.x(), bex = pb.x() - pe.x(), cex = pc.x() - pe.x(), dex = pd.x() - pe.x();
  const double aey = pa.y() - pe.y(), bey = pb.y() - pe.y(), cey = pc.y() - pe.y(), dey = pd.y() - pe.y();
  const double aez = pa.z() - pe.z(), bez = pb.z() - pe.z(), cez = pc.z() - pe.z(), dez = pd.z() - pe.z();

  const double aexbey = aex * bey, bexaey = bex * aey;
  const double ab = aexbey - bexaey;
  const double bexcey = bex * cey, cexbey = cex * bey;
  const double bc = bexcey - cexbey;
  const double cexdey = cex * dey, dexcey = dex * cey;
  const double cd = cexdey - dexcey;
  const double dexaey = dex * aey, aexdey = aex * dey;
  const double da = dexaey - aexdey;
  const double aexcey = aex * cey, cexaey = cex * aey;
  const double ac = aexcey - cexaey;
  const double bexdey = bex * dey, dexbey = dex * bey;
  const double bd = bexdey - dexbey;

  const double abc = aez * bc - bez * ac + cez * ab;
  const double bcd = bez * cd - cez * bd + dez * bc;
  const double cda = cez * da + dez * ac + aez * cd;
  const double dab = dez * ab + aez * bd + bez * da;

  const double alift = aex * aex + aey * aey + aez * aez;
  const double blift = bex * bex + bey * bey + bez * bez;
  const double clift = cex * cex + cey * cey + cez * cez;
  const double dlift = dex * dex + dey * dey + dez * dez;

  const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

  const double aezplus = std::abs(aez), bezplus = std::abs(bez), cezplus = std::abs(cez), dezplus = std::abs(dez);
  const double aexbeyplus = std::abs(aexbey) + std::abs(bexaey);
  const double bexceyplus = std::abs(bexcey) + std::abs(cexbey);
  const double cexdeyplus = std::abs(cexdey) + std::abs(dexcey);
  const double dexaeyplus = std::abs(dexaey) + std::abs(aexdey);
  const double aexceyplus = std::abs(aexcey) + std::abs(cexaey);
  const double bexdeyplus = std::abs(bexdey) + std::abs(dexbey);
  const double permanent =
      ((cexdeyplus * bezplus + bexdeyplus * cezplus + bexceyplus * dezplus) * alift +
       (dexaeyplus * cezplus + aexceyplus * dezplus + cexdeyplus * aezplus) * blift +
       (aexbeyplus * dezplus + bexdeyplus * aezplus + dexaeyplus * bezplus) * clift +
       (bexceyplus * aezplus + aexceyplus * bezplus + aexbeyplus * cezplus) * dlift);
  if (std::abs(det) > kIspErrBound * permanent) return sign_of(det);
  g_insphere_exact.fetch_add(1, std::memory_order_relaxed);
  return insphere_reference_exact(pa, pb, pc, pd, pe);
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) { return orient2d_raw(a, b, c); }

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // det[b-a; c-a; d-a] = -det[a-d; b-d; c-d]
  return -orient3d_reference(a, b, c, d);
}

int oriented_in_sphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  return -insphere_reference(a, b, c, d, e);
}

int in_sphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  const int o = orient3d(a, b, c, d);
  if (o == 0) throw GeometryError("in_sphere: degenerate (coplanar) base simplex");
  return o * oriented_in_sphere(a, b, c, d, e);
}

int coplanar_orientation(const Vec3& p, const Vec3& q, const Vec3& r) {
  const int oxy = orient2d(Vec2(p.x(), p.y()), Vec2(q.x(), q.y()), Vec2(r.x(), r.y()));
  if (oxy != 0) return oxy;
  const int oyz = orient2d(Vec2(p.y(), p.z()), Vec2(q.y(), q.z()), Vec2(r.y(), r.z()));
  if (oyz != 0) return oyz;
  return orient2d(Vec2(p.x(), p.z()), Vec2(q.x(), q.z()), Vec2(r.x(), r.z()));
}

bool collinear(const Vec3& a, const Vec3& b, const Vec3& c) { return coplanar_orientation(a, b, c) == 0; }

int coplanar_side_of_circle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p) {
  if (collinear(p0, p1, p2)) throw GeometryError("coplanar_side_of_circle: collinear triangle");
  // Any sphere through p0,p1,p2 meets their plane in the circumcircle, so an
  // auxiliary off-plane point turns the circle test into an insphere test.
  const double reach = 1.0 + std::max({p0.cwiseAbs().maxCoeff(), p1.cwiseAbs().maxCoeff(),
                                       p2.cwiseAbs().maxCoeff(), p.cwiseAbs().maxCoeff()});
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 s = p0 + reach * Vec3::Unit(axis);
    const int o = orient3d(p0, p1, p2, s);
    if (o != 0) return o * oriented_in_sphere(p0, p1, p2, s, p);
  }
  throw GeometryError("coplanar_side_of_circle: no auxiliary point found");
}

int in_sphere_perturbed(const std::array<IndexedPoint, 4>& tet, IndexedPoint e) {
  const Vec3& p0 = *tet[0].p;
  const Vec3& p1 = *tet[1].p;
  const Vec3& p2 = *tet[2].p;
  const Vec3& p3 = *tet[3].p;
  const Vec3& q = *e.p;
  const int s = oriented_in_sphere(p0, p1, p2, p3, q);
  if (s != 0) return s;

  // slot 4 is the query point
  std::array<int, 5> slots{0, 1, 2, 3, 4};
  auto index_of = [&](int slot) { return slot == 4 ? e.index : tet[slot].index; };
  std::sort(slots.begin(), slots.end(), [&](int a, int b) { return index_of(a) < index_of(b); });
  for (int i = 4; i >= 0; --i) {
    int o = 0;
    switch (slots[i]) {
      case 4:
        return -1;
      case 3:
        o = orient3d(p0, p1, p2, q);
        break;
      case 2:
        o = orient3d(p0, p1, q, p3);
        break;
      case 1:
        o = orient3d(p0, q, p2, p3);
        break;
      case 0:
        o = orient3d(q, p1, p2, p3);
        break;
    }
    if (o != 0) return o;
  }
  throw GeometryError("in_sphere_perturbed: degenerate base tetrahedron");
}

int coplanar_side_of_circle_perturbed(const std::array<IndexedPoint, 3>& tri, IndexedPoint e) {
  const Vec3& p0 = *tri[0].p;
  const Vec3& p1 = *tri[1].p;
  const Vec3& p2 = *tri[2].p;
  const Vec3& q = *e.p;
  const int s = coplanar_side_of_circle(p0, p1, p2, q);
  if (s != 0) return s;

  std::array<int, 4> slots{0, 1, 2, 3};
  auto index_of = [&](int slot) { return slot == 3 ? e.index : tri[slot].index; };
  std::sort(slots.begin(), slots.end(), [&](int a, int b) { return index_of(a) < index_of(b); });
  const int local = coplanar_orientation(p0, p1, p2);
  for (int i = 3; i >= 0; --i) {
    int o = 0;
    switch (slots[i]) {
      case 3:
        return -1;
      case 2:
        o = coplanar_orientation(p0, p1, q);
        break;
      case 1:
        o = coplanar_orientation(p0, q, p2);
        break;
      case 0:
        o = coplanar_orientation(q, p1, p2);
        break;
    }
    if (o != 0) return o * local;
  }
  throw GeometryError("coplanar_side_of_circle_perturbed: collinear triangle");
}

FallbackCounters fallback_counters() {
  return {g_orient_exact.load(std::memory_order_relaxed), g_insphere_exact.load(std::memory_order_relaxed)};
}

}  // namespace rdt::predicates
