#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdt/restricted.hpp"

namespace rdt {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SampleMode { eps_sample, eps_voronoi_sample };
const char* to_string(SampleMode m);
SampleMode parse_sample_mode(const std::string& s);

enum class InitialSite { random, first };

struct SampleSpec {
  double epsilon = 0.3;
  SampleMode mode = SampleMode::eps_sample;
  std::uint64_t seed = 0;
  InitialSite initial = InitialSite::random;
  double safety = tol::sampling_safety;
  int min_sites = 4;
};

/// Certificate over a cover. `epsilon` is the supremum over cover points,
/// raised by local ascent on the surface from the best ones when refined;
/// `epsilon_bound` widens the cover supremum by the cover radius so that it
/// bounds the supremum over the whole surface.
struct SampleCertificate {
  SampleMode mode = SampleMode::eps_sample;
  double epsilon = 0;
  double epsilon_bound = 0;
  Vec3 witness = Vec3::Zero();
  int witness_site = -1;
  double cover_spacing = 0;
  int cover_points = 0;
  int site_count = 0;
  bool refined = false;
};

struct SiteSet {
  std::vector<Vec3> sites;
  SampleSpec spec;
  SampleCertificate certificate;  // measured on the generating cover
};

/// Farthest-point insertion over the cover until the measured ratio is at most
/// epsilon * safety, then refined witnesses are inserted until the refined
/// certificate is at most epsilon. Deterministic per seed.
SiteSet generate(const ImplicitSurface& surface, const LfsOracle& lfs, const CoverContext& cover, const SampleSpec& spec);

SampleCertificate verify_eps_sample(const std::vector<Vec3>& sites, const ImplicitSurface& surface,
                                    const LfsOracle& lfs, const SurfaceCover& cover, bool refine = true);

/// Supremum over restricted cells of max |xv| / lfs(v).
SampleCertificate verify_eps_voronoi_sample(const RestrictedComplex& rc, const ImplicitSurface& surface,
                                            const LfsOracle& lfs, bool refine = true);

struct SixSitesReport {
  std::vector<int> cells_per_component;
  std::vector<int> sites_per_component;
  double voronoi_ratio = 0;
  bool xi_condition = false;   // Voronoi ratio below xi, so the six-site bound applies
  bool contradiction = false;  // fewer than six cells on a component under the condition
};

SixSitesReport six_sites_check(const RestrictedComplex& rc, const ImplicitSurface& surface, const LfsOracle& lfs);

}  // namespace rdt
