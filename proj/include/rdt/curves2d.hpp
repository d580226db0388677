#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdt/geometry.hpp"

namespace rdt {

class CurveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smooth closed star-shaped plane curve r(theta) (cos theta, sin theta).
class PlaneCurve {
 public:
  virtual ~PlaneCurve() = default;
  virtual std::string name() const = 0;
  virtual std::map<std::string, double> parameters() const = 0;
  virtual double radius(double theta) const = 0;
  virtual double radius_derivative(double theta) const = 0;
  /// Local feature size at the curve point of parameter theta.
  virtual double lfs(double theta) const = 0;
  virtual bool analytic_lfs() const = 0;
  /// |estimate - lfs| bound; zero when analytic.
  virtual double lfs_error() const { return 0; }
  int component_count() const { return 1; }

  Vec2 point(double theta) const;
  Vec2 tangent(double theta) const;  // unit, counter-clockwise
  Vec2 normal(double theta) const;   // unit, outward
  double speed(double theta) const;
  /// Field |x| - r(atan2 x): negative inside.
  double value(const Vec2& x) const;
  double min_lfs() const;
};

using CurvePtr = std::shared_ptr<const PlaneCurve>;

/// circle (radius), ellipse (a, b), flower (radius, amplitude, petals).
CurvePtr make_curve(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> curve_catalog_names();

/// Parameters spaced uniformly in theta.
struct CurveCover {
  std::vector<double> thetas;
  std::vector<Vec2> points;
  std::vector<double> lfs;
  double radius = 0;  // every curve point lies within this of a cover point
};
CurveCover curve_cover(const PlaneCurve& curve, int count = 20000);

struct CurveCertificate {
  double epsilon = 0;        // refined max d(x, V) / lfs(x)
  double epsilon_bound = 0;  // max (d + r) / (lfs - r) over the cover
  double witness_theta = 0;
  int site_count = 0;
};

CurveCertificate verify_curve_sample(const PlaneCurve& curve, const std::vector<Vec2>& sites, const CurveCover& cover);

struct CurveSampleSpec {
  double epsilon = 0.3;
  std::uint64_t seed = 1;
  double safety = 0.95;
  int min_sites = 3;
};

struct CurveSiteSet {
  std::vector<double> thetas;
  std::vector<Vec2> sites;
  CurveCertificate certificate;
};

CurveSiteSet generate_curve_sample(const PlaneCurve& curve, const CurveCover& cover, const CurveSampleSpec& spec);

/// Restricted Voronoi vertex: a curve point equidistant from two sites with none closer.
struct CurveVertex {
  Vec2 point;
  double theta = 0;
  int u = -1, w = -1;  // u < w
};

struct CurveRdt {
  std::vector<Vec2> sites;
  std::vector<CurveVertex> vertices;
  std::vector<std::array<int, 2>> edges;  // sorted, one per site pair with a vertex
  std::vector<int> hits;                  // restricted vertices per edge
  int grazing = 0;                        // tangential nearest-site contacts
  bool degenerate = false;                // fewer than three sites
};

CurveRdt rdt2d(const std::vector<Vec2>& sites, const PlaneCurve& curve);

struct PolygonWitness {
  std::string what;
  int site = -1;
  Vec2 point = Vec2::Zero();
};

struct PolygonReport {
  bool all_degree_two = true;
  bool single_hits = true;  // every edge has one restricted vertex
  int cycles = 0;
  int expected_components = 1;
  std::vector<PolygonWitness> witnesses;
  bool valid() const { return all_degree_two && single_hits && cycles == expected_components && witnesses.empty(); }
};

PolygonReport verify_polygon(const CurveRdt& rdt, const PlaneCurve& curve);

void write_svg(std::ostream& out, const PlaneCurve& curve, const CurveRdt& rdt);

}  // namespace rdt
