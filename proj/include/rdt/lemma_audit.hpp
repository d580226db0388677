#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdt/restricted.hpp"

namespace rdt {

class AuditError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Normal variation bound arccos(1 - d^2 / (2 sqrt(1 - d^2))) in radians,
/// for 0 <= d < sqrt(4 sqrt(5) - 8).
double eta(double delta);

/// (r / lfs) max(cot(phi / 2), 1) for a plane angle phi in (0, pi).
double triangle_normal_bound(double r_over_lfs, double phi);

struct FeatureFactors {
  double lfs_factor = 1;       // 1 / (1 - eps)
  double distance_factor = 0;  // eps / (1 - eps)
};
FeatureFactors feature_translation(double epsilon);

struct AuditConfig {
  int trials = 10000;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  int max_witnesses = 8;
  double radius_factor = 0;          // projection audit ball radius / lfs; 0 selects kappa
  bool force_normal_direction = false;  // projection audit: skip the admissibility test
};

struct AuditWitness {
  int trial = -1;
  std::string what;
  Vec3 p = Vec3::Zero();
  Vec3 q = Vec3::Zero();
  double margin = 0;
};

struct AuditResult {
  std::string audit;
  std::string surface;
  int trials = 0;
  int passed = 0;
  int counterexamples = 0;
  int skipped = 0;  // precondition not met
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<AuditWitness> witnesses;

  bool pass() const { return counterexamples == 0; }
};

/// Tangent planes near v separate the two lfs-ball centres of v.
AuditResult audit_abovebelow(const ImplicitSurface& surface, const LfsOracle& lfs, const AuditConfig& config = {});
/// On a traced bisector curve, the ray from x toward T_x meets oo' on v's side of the bisector.
AuditResult audit_raybisector(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                              const AuditConfig& config = {});
AuditResult audit_normal_variation(const ImplicitSurface& surface, const LfsOracle& lfs,
                                   const AuditConfig& config = {});
AuditResult audit_triangle_normal(const ImplicitSurface& surface, const LfsOracle& lfs,
                                  const AuditConfig& config = {});
AuditResult audit_feature_translation(const ImplicitSurface& surface, const LfsOracle& lfs,
                                      const AuditConfig& config = {});
/// One trial per Voronoi edge of three sites meeting the kappa condition.
AuditResult audit_vertex_uniqueness(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                                    const AuditConfig& config = {});
/// One trial per 2-face meeting the surface whose restricted vertices satisfy
/// the 0.3245 or 0.4132 condition.
AuditResult audit_edge_structure(const ImplicitSurface& surface, const LfsOracle& lfs, const RestrictedComplex& rc,
                                 const AuditConfig& config = {});
/// Cover points in a ball of radius kappa lfs(v) project injectively along an admissible direction.
AuditResult audit_projection_injectivity(const ImplicitSurface& surface, const LfsOracle& lfs,
                                         const CoverContext& cover, const AuditConfig& config = {});

}  // namespace rdt
