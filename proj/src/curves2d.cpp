#include "rdt/curves2d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "rdt/spatial_grid.hpp"

namespace rdt {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double param(const std::map<std::string, double>& p, const char* key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void require_known(const std::map<std::string, double>& p, std::initializer_list<const char*> keys,
                   const std::string& curve) {
  for (const auto& [k, v] : p)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* q) { return k == q; }))
      throw CurveError("unknown parameter '" + k + "' for curve '" + curve + "'");
}

class Circle final : public PlaneCurve {
 public:
  explicit Circle(double r) : r_(r) {
    if (!(r > 0)) throw CurveError("circle radius must be positive");
  }
  std::string name() const override { return "circle"; }
  std::map<std::string, double> parameters() const override { return {{"radius", r_}}; }
  double radius(double) const override { return r_; }
  double radius_derivative(double) const override { return 0; }
  double lfs(double) const override { return r_; }
  bool analytic_lfs() const override { return true; }

 private:
  double r_;
};

// Medial axis of the ellipse is the segment between the centres of curvature at the vertices.
class Ellipse final : public PlaneCurve {
 public:
  Ellipse(double a, double b) : a_(a), b_(b) {
    if (!(a > 0 && b > 0)) throw CurveError("ellipse semi-axes must be positive");
  }
  std::string name() const override { return "ellipse"; }
  std::map<std::string, double> parameters() const override { return {{"a", a_}, {"b", b_}}; }
  double radius(double t) const override { return a_ * b_ / std::sqrt(d(t)); }
  double radius_derivative(double t) const override {
    return -a_ * b_ * (a_ * a_ - b_ * b_) * std::sin(t) * std::cos(t) / std::pow(d(t), 1.5);
  }
  double lfs(double t) const override {
    const Vec2 p = point(t);
    if (a_ >= b_) {
      const double c = (a_ * a_ - b_ * b_) / a_;
      return Vec2(p.x() - std::clamp(p.x(), -c, c), p.y()).norm();
    }
    const double c = (b_ * b_ - a_ * a_) / b_;
    return Vec2(p.x(), p.y() - std::clamp(p.y(), -c, c)).norm();
  }
  bool analytic_lfs() const override { return true; }

 private:
  double d(double t) const {
    const double c = std::cos(t), s = std::sin(t);
    return b_ * b_ * c * c + a_ * a_ * s * s;
  }
  double a_, b_;
};

// r = R (1 + A cos(k theta)); lfs from the centres of maximal empty disks at dense samples.
class Flower final : public PlaneCurve {
 public:
  Flower(double r, double amplitude, double petals) : r_(r), a_(amplitude), k_(petals) {
    if (!(r > 0 && amplitude >= 0 && amplitude < 1)) throw CurveError("flower needs radius > 0, 0 <= amplitude < 1");
    if (!(petals >= 1) || petals != std::floor(petals)) throw CurveError("flower petals must be a positive integer");
    build_medial();
  }
  std::string name() const override { return "flower"; }
  std::map<std::string, double> parameters() const override {
    return {{"radius", r_}, {"amplitude", a_}, {"petals", k_}};
  }
  double radius(double t) const override { return r_ * (1 + a_ * std::cos(k_ * t)); }
  double radius_derivative(double t) const override { return -r_ * a_ * k_ * std::sin(k_ * t); }
  double lfs(double t) const override {
    const Vec2 p = point(t);
    double d = 0;
    medial_.nearest(Vec3(p.x(), p.y(), 0), &d);
    return d;
  }
  bool analytic_lfs() const override { return false; }
  double lfs_error() const override { return error_; }

 private:
  static constexpr int kSamples = 8192;

  // Estimate from kSamples points; the error is its deviation from a half-resolution estimate.
  void build_medial() {
    medial_ = medial_tree(kSamples);
    const KdTree coarse = medial_tree(kSamples / 2);
    for (int i = 0; i < 4096; ++i) {
      const Vec2 p = point(kTwoPi * (i + 0.5) / 4096);
      double a = 0, b = 0;
      medial_.nearest(Vec3(p.x(), p.y(), 0), &a);
      coarse.nearest(Vec3(p.x(), p.y(), 0), &b);
      error_ = std::max(error_, std::abs(a - b));
    }
  }

  KdTree medial_tree(int samples) const {
    std::vector<Vec2> p(static_cast<std::size_t>(samples)), n(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
      const double t = kTwoPi * i / samples;
      p[static_cast<std::size_t>(i)] = point(t);
      n[static_cast<std::size_t>(i)] = normal(t);
    }
    std::vector<Vec3> centres;
    const double cap = 10 * r_ * (1 + a_);
    for (double side : {1.0, -1.0})
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2 ni = side * n[i];
        double rad = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < p.size(); ++j) {
          const Vec2 d = p[i] - p[j];
          const double h = ni.dot(d);
          if (h > 0) rad = std::min(rad, d.squaredNorm() / (2 * h));
        }
        if (!(rad < cap)) continue;
        const Vec2 c = p[i] - rad * ni;
        centres.emplace_back(c.x(), c.y(), 0);
      }
    return KdTree(std::move(centres));
  }

  double r_, a_, k_;
  double error_ = 0;
  KdTree medial_;
};

int nearest(const std::vector<Vec2>& sites, const Vec2& x, double* d1, double* d2 = nullptr) {
  int best = -1;
  double b1 = std::numeric_limits<double>::infinity(), b2 = b1;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double d = (sites[i] - x).norm();
    if (d < b1) {
      b2 = b1;
      b1 = d;
      best = static_cast<int>(i);
    } else if (d < b2) {
      b2 = d;
    }
  }
  if (d1) *d1 = b1;
  if (d2) *d2 = b2;
  return best;
}

double wrap(double t) {
  t = std::fmod(t, kTwoPi);
  return t < 0 ? t + kTwoPi : t;
}

}  // namespace

Vec2 PlaneCurve::point(double t) const { return radius(t) * Vec2(std::cos(t), std::sin(t)); }

Vec2 PlaneCurve::tangent(double t) const {
  const double r = radius(t), dr = radius_derivative(t);
  const Vec2 d(dr * std::cos(t) - r * std::sin(t), dr * std::sin(t) + r * std::cos(t));
  return d.normalized();
}

Vec2 PlaneCurve::normal(double t) const {
  const Vec2 tg = tangent(t);
  return Vec2(tg.y(), -tg.x());
}

double PlaneCurve::speed(double t) const { return std::hypot(radius(t), radius_derivative(t)); }

double PlaneCurve::value(const Vec2& x) const { return x.norm() - radius(std::atan2(x.y(), x.x())); }

double PlaneCurve::min_lfs() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4096; ++i) m = std::min(m, lfs(kTwoPi * i / 4096));
  return m;
}

CurvePtr make_curve(const std::string& name, const std::map<std::string, double>& p) {
  if (name == "circle") {
    require_known(p, {"radius"}, name);
    return std::make_shared<Circle>(param(p, "radius", 1));
  }
  if (name == "ellipse") {
    require_known(p, {"a", "b"}, name);
    return std::make_shared<Ellipse>(param(p, "a", 1.5), param(p, "b", 1));
  }
  if (name == "flower") {
    require_known(p, {"radius", "amplitude", "petals"}, name);
    return std::make_shared<Flower>(param(p, "radius", 1), param(p, "amplitude", 0.2), param(p, "petals", 5));
  }
  throw CurveError("unknown curve '" + name + "' (circle, ellipse, flower)");
}

std::vector<std::string> curve_catalog_names() { return {"circle", "ellipse", "flower"}; }

CurveCover curve_cover(const PlaneCurve& curve, int count) {
  if (count < 3) throw CurveError("curve cover needs at least three points");
  CurveCover c;
  for (int i = 0; i < count; ++i) {
    const double t = kTwoPi * i / count;
    c.thetas.push_back(t);
    c.points.push_back(curve.point(t));
    c.lfs.push_back(curve.lfs(t));
  }
  // Half the arc between neighbours, with the speed taken at the ends and middle.
  for (int i = 0; i < count; ++i) {
    const double a = c.thetas[static_cast<std::size_t>(i)], dt = kTwoPi / count;
    const double v = std::max({curve.speed(a), curve.speed(a + dt / 2), curve.speed(a + dt)});
    c.radius = std::max(c.radius, 0.5 * 1.01 * v * dt);
  }
  return c;
}

namespace {

struct Ascent {
  double theta, value;
};

Ascent ascend(const PlaneCurve& curve, const std::vector<Vec2>& sites, double t, double step) {
  auto f = [&](double s) {
    double d = 0;
    nearest(sites, curve.point(s), &d);
    return d / curve.lfs(s);
  };
  double best = f(t);
  while (step > 1e-13) {
    bool moved = false;
    for (double s : {t + step, t - step}) {
      const double v = f(s);
      if (v > best) {
        best = v;
        t = wrap(s);
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {t, best};
}

CurveCertificate certify(const PlaneCurve& curve, const std::vector<Vec2>& sites, const CurveCover& cover,
                         double report, std::vector<double>* above) {
  if (sites.empty()) throw CurveError("empty site set");
  CurveCertificate c;
  c.site_count = static_cast<int>(sites.size());
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < cover.points.size(); ++i) {
    double d = 0;
    nearest(sites, cover.points[i], &d);
    const double q = d / cover.lfs[i];
    ranked.emplace_back(-q, i);
    if (q > c.epsilon) {
      c.epsilon = q;
      c.witness_theta = cover.thetas[i];
    }
    const double low = cover.lfs[i] - cover.radius - curve.lfs_error();
    c.epsilon_bound =
        std::max(c.epsilon_bound, low > 0 ? (d + cover.radius) / low : std::numeric_limits<double>::infinity());
  }
  const std::size_t k = std::min<std::size_t>(16, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  const double step = kTwoPi / static_cast<double>(cover.points.size());
  for (std::size_t i = 0; i < k; ++i) {
    const Ascent a = ascend(curve, sites, cover.thetas[ranked[i].second], step);
    if (a.value > c.epsilon) {
      c.epsilon = a.value;
      c.witness_theta = a.theta;
    }
    if (above && a.value > report &&
        std::none_of(above->begin(), above->end(), [&](double t) { return std::abs(t - a.theta) < step; }))
      above->push_back(a.theta);
  }
  return c;
}

}  // namespace

CurveCertificate verify_curve_sample(const PlaneCurve& curve, const std::vector<Vec2>& sites, const CurveCover& cover) {
  return certify(curve, sites, cover, 0, nullptr);
}

CurveSiteSet generate_curve_sample(const PlaneCurve& curve, const CurveCover& cover, const CurveSampleSpec& spec) {
  if (!(spec.epsilon > 0 && spec.epsilon < 1)) throw CurveError("epsilon must lie in (0, 1)");
  const std::size_t n = cover.points.size();
  const double target = spec.epsilon * spec.safety;
  const double fmin = *std::min_element(cover.lfs.begin(), cover.lfs.end());
  if (target * fmin <= cover.radius) throw CurveError("target epsilon is unreachable at this cover density");

  CurveSiteSet out;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  auto insert = [&](double t) {
    const Vec2 p = curve.point(t);
    out.thetas.push_back(t);
    out.sites.push_back(p);
    for (std::size_t j = 0; j < n; ++j) dist[j] = std::min(dist[j], (cover.points[j] - p).norm());
  };
  std::mt19937_64 rng(spec.seed);
  insert(cover.thetas[static_cast<std::size_t>(rng() % n)]);
  while (true) {
    std::size_t best = 0;
    double br = -1;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = dist[j] / cover.lfs[j];
      if (r > br) {
        br = r;
        best = j;
      }
    }
    if (br <= target && static_cast<int>(out.sites.size()) >= spec.min_sites) break;
    insert(cover.thetas[best]);
  }
  for (int round = 0;; ++round) {
    std::vector<double> above;
    out.certificate = certify(curve, out.sites, cover, spec.epsilon, &above);
    if (out.certificate.epsilon <= spec.epsilon) break;
    if (round >= 100) throw CurveError("refined certificate does not reach the target");
    for (double t : above) insert(t);
  }
  return out;
}

CurveRdt rdt2d(const std::vector<Vec2>& sites, const PlaneCurve& curve) {
  CurveRdt r;
  r.sites = sites;
  r.degenerate = sites.size() < 3;
  if (sites.size() < 2) return r;

  struct Probe {
    double t;
    int v;
    double gap;  // second-nearest minus nearest distance
  };
  auto probe = [&](double t) {
    double d1 = 0, d2 = 0;
    const int v = nearest(sites, curve.point(t), &d1, &d2);
    return Probe{t, v, d2 - d1};
  };
  std::map<std::array<int, 2>, int> hits;
  // The gap is 2-Lipschitz along the curve, so a wide gap at both ends excludes a change in between.
  std::function<void(const Probe&, const Probe&, int)> scan = [&](const Probe& a, const Probe& b, int depth) {
    const double width = b.t - a.t;
    if (a.v == b.v) {
      const double arc = 1.2 * width * std::max({curve.speed(a.t), curve.speed(0.5 * (a.t + b.t)), curve.speed(b.t)});
      if (a.gap + b.gap > 2 * arc) return;
      if (depth >= 60 || width < 1e-14) {
        // Next to a transversal crossing the gap vanishes at one end; only a touch
        // with no change on either side counts as grazing.
        if (probe(a.t - 1e-10).v == a.v && probe(b.t + 1e-10).v == a.v) ++r.grazing;
        return;
      }
    } else if (depth >= 60 || width < 1e-13) {
      const double t = 0.5 * (a.t + b.t);
      const int u = std::min(a.v, b.v), w = std::max(a.v, b.v);
      r.vertices.push_back({curve.point(t), wrap(t), u, w});
      ++hits[{u, w}];
      return;
    }
    const Probe m = probe(0.5 * (a.t + b.t));
    scan(a, m, depth + 1);
    scan(m, b, depth + 1);
  };
  constexpr int kGrid = 4096;
  Probe first = probe(0), prev = first;
  for (int i = 1; i <= kGrid; ++i) {
    Probe p = i == kGrid ? Probe{kTwoPi, first.v, first.gap} : probe(kTwoPi * i / kGrid);
    scan(prev, p, 0);
    prev = p;
  }
  for (const auto& [e, k] : hits) {
    r.edges.push_back(e);
    r.hits.push_back(k);
  }
  return r;
}

PolygonReport verify_polygon(const CurveRdt& rdt, const PlaneCurve& curve) {
  PolygonReport rep;
  rep.expected_components = curve.component_count();
  const std::size_t n = rdt.sites.size();
  std::vector<int> degree(n, 0);
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (std::size_t e = 0; e < rdt.edges.size(); ++e) {
    const auto [u, w] = rdt.edges[e];
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(w)];
    parent[static_cast<std::size_t>(find(u))] = find(w);
    if (rdt.hits[e] != 1) {
      rep.single_hits = false;
      rep.witnesses.push_back({"bisector meets the curve " + std::to_string(rdt.hits[e]) + " times", u,
                               rdt.sites[static_cast<std::size_t>(u)]});
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (degree[v] != 2) {
      rep.all_degree_two = false;
      rep.witnesses.push_back({"site has degree " + std::to_string(degree[v]), static_cast<int>(v), rdt.sites[v]});
    }
  if (rdt.grazing > 0) rep.witnesses.push_back({"tangential nearest-site contact", -1, Vec2::Zero()});
  if (rdt.degenerate) rep.witnesses.push_back({"fewer than three sites", -1, Vec2::Zero()});
  std::map<int, std::pair<int, int>> comp;  // root -> (sites, edges)
  for (std::size_t v = 0; v < n; ++v) ++comp[find(static_cast<int>(v))].first;
  for (const auto& e : rdt.edges) ++comp[find(e[0])].second;
  for (const auto& [root, c] : comp)
    if (c.first >= 3 && c.first == c.second) ++rep.cycles;
  return rep;
}

void write_svg(std::ostream& out, const PlaneCurve& curve, const CurveRdt& rdt) {
  double extent = 0;
  for (int i = 0; i < 720; ++i) extent = std::max(extent, curve.point(kTwoPi * i / 720).cwiseAbs().maxCoeff());
  extent *= 1.1;
  const double w = extent / 200;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -extent << ' ' << -extent << ' ' << 2 * extent << ' '
      << 2 * extent << "\">\n<g transform=\"scale(1,-1)\">\n";
  out << "<polygon fill=\"none\" stroke=\"#888\" stroke-width=\"" << w << "\" points=\"";
  for (int i = 0; i < 720; ++i) {
    const Vec2 p = curve.point(kTwoPi * i / 720);
    out << p.x() << ',' << p.y() << ' ';
  }
  out << "\"/>\n";
  for (const auto& e : rdt.edges) {
    const Vec2& a = rdt.sites[static_cast<std::size_t>(e[0])];
    const Vec2& b = rdt.sites[static_cast<std::size_t>(e[1])];
    out << "<line x1=\"" << a.x() << "\" y1=\"" << a.y() << "\" x2=\"" << b.x() << "\" y2=\"" << b.y()
        << "\" stroke=\"#1665c1\" stroke-width=\"" << 2 * w << "\"/>\n";
  }
  for (const Vec2& s : rdt.sites)
    out << "<circle cx=\"" << s.x() << "\" cy=\"" << s.y() << "\" r=\"" << 3 * w << "\" fill=\"#c11616\"/>\n";
  out << "</g>\n</svg>\n";
}

}  // namespace rdt
