#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdt/io.hpp"

namespace rdt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string surface = "sphere";
  std::map<std::string, double> params;
  std::string curve;  // non-empty selects the plane-curve pipeline
  SampleMode mode = SampleMode::eps_sample;
  double epsilon = 0.3;
  std::uint64_t seed = 1;
  InitialSite initial = InitialSite::random;
  double cover = 0;  // cover spacing; 0 picks a default for the surface
  int curve_cover = 20000;
  std::string input;
  std::string output = "out";
  bool force = false;
  int trials = 10000;
  std::vector<std::string> lemmas;  // empty: all
  double dtheta_degrees = 1;
  bool star_shape = false;

  /// key = value assignment; keys as in to_json, surface parameters as param.<name>.
  void set(const std::string& key, const std::string& value);
  /// Lines of key = value; '#' starts a comment.
  void load(const std::string& text);
  void validate() const;
  double cover_spacing() const;
  Json to_json() const;
};

/// Surface, cover, and lfs oracle shared by runs on one surface.
struct SurfaceContext {
  SurfacePtr surface;
  CoverContext cover;
  LfsOracle lfs;
};
SurfaceContext make_context(const RunConfig& config);

struct PipelineResult {
  std::vector<Vec3> sites;
  std::optional<SampleCertificate> certificate;
  RestrictedComplex rc;
  RdtMesh mesh;
  PropertyReport properties;
  TopologyReport topology;
  std::vector<StarShapeResult> star_shape;
  std::map<std::string, double> seconds;
};

SiteSet sample(const SurfaceContext& ctx, const RunConfig& config);
/// Voronoi, restricted complex, properties, dual mesh, and validation of a site set.
PipelineResult reconstruct(const SurfaceContext& ctx, const RunConfig& config, std::vector<Vec3> sites,
                           std::optional<SampleCertificate> certificate = std::nullopt);

const std::vector<std::string>& lemma_names();
std::vector<AuditResult> run_audits(const SurfaceContext& ctx, const RunConfig& config);

/// Schema-versioned report; timing is kept out so equal runs give equal bytes.
Json run_report(const RunConfig& config, const PipelineResult& result);
Json timing_report(const PipelineResult& result);
bool report_pass(const PipelineResult& result);

struct CurveResult {
  CurveSiteSet sample;
  CurveRdt rdt;
  PolygonReport polygon;
};
CurveResult run_curve(const RunConfig& config);
Json curve_report(const RunConfig& config, const CurveResult& result);

}  // namespace rdt
