#include "rdt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rdt {

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t n = 0;
    const double x = std::stod(v, &n);
    if (n != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key.rfind("param.", 0) == 0) {
    params[key.substr(6)] = to_double(key, value);
  } else if (key == "surface") {
    surface = value;
  } else if (key == "curve") {
    curve = value;
  } else if (key == "mode") {
    mode = parse_sample_mode(value);
  } else if (key == "eps" || key == "epsilon") {
    epsilon = to_double(key, value);
  } else if (key == "seed") {
    const double s = to_double(key, value);
    if (s < 0 || s != std::floor(s)) throw ConfigError("'seed' expects a non-negative integer");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "initial") {
    if (value == "random") initial = InitialSite::random;
    else if (value == "first") initial = InitialSite::first;
    else throw ConfigError("'initial' expects random or first");
  } else if (key == "cover") {
    cover = to_double(key, value);
  } else if (key == "curve_cover") {
    curve_cover = static_cast<int>(to_double(key, value));
  } else if (key == "input") {
    input = value;
  } else if (key == "output" || key == "out") {
    output = value;
  } else if (key == "force") {
    force = to_bool(key, value);
  } else if (key == "trials") {
    trials = static_cast<int>(to_double(key, value));
  } else if (key == "lemmas") {
    lemmas.clear();
    std::istringstream s(value);
    std::string item;
    while (std::getline(s, item, ','))
      if (!trim(item).empty()) lemmas.push_back(trim(item));
  } else if (key == "dtheta") {
    dtheta_degrees = to_double(key, value);
  } else if (key == "star_shape") {
    star_shape = to_bool(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void RunConfig::load(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must lie in (0, 1)");
  if (cover < 0) throw ConfigError("cover spacing must be positive");
  if (trials < 1) throw ConfigError("trials must be positive");
  if (curve_cover < 3) throw ConfigError("curve_cover must be at least 3");
  if (!(dtheta_degrees > 0 && dtheta_degrees <= 90)) throw ConfigError("dtheta must lie in (0, 90] degrees");
  if (curve.empty()) {
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), surface) == names.end()) {
      std::string list;
      for (const auto& s : names) list += (list.empty() ? "" : ", ") + s;
      throw ConfigError("unknown surface '" + surface + "' (" + list + ")");
    }
    make_surface(surface, params);
  } else {
    make_curve(curve, params);
  }
  for (const auto& l : lemmas)
    if (std::find(lemma_names().begin(), lemma_names().end(), l) == lemma_names().end()) {
      std::string list;
      for (const auto& s : lemma_names()) list += (list.empty() ? "" : ", ") + s;
      throw ConfigError("unknown lemma '" + l + "' (" + list + ")");
    }
}

double RunConfig::cover_spacing() const {
  if (cover > 0) return cover;
  const auto s = make_surface(surface, params);
  return s->analytic_lfs(s->bounding_box().center()) ? 0.04 : 0.025;
}

Json RunConfig::to_json() const {
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  Json l = Json::array();
  for (const auto& s : lemmas) l.push_back(s);
  return {{"surface", surface},
          {"params", p},
          {"curve", curve},
          {"mode", rdt::to_string(mode)},
          {"epsilon", epsilon},
          {"seed", seed},
          {"initial", initial == InitialSite::random ? "random" : "first"},
          {"cover", cover},
          {"curve_cover", curve_cover},
          {"input", input},
          {"output", output},
          {"trials", trials},
          {"lemmas", l},
          {"dtheta", dtheta_degrees},
          {"star_shape", star_shape}};
}

SurfaceContext make_context(const RunConfig& config) {
  SurfaceContext ctx;
  ctx.surface = make_surface(config.surface, config.params);
  ctx.cover = make_cover_context(*ctx.surface, config.cover_spacing());
  ctx.lfs = LfsOracle::for_surface(ctx.surface, ctx.cover.cover);
  return ctx;
}

SiteSet sample(const SurfaceContext& ctx, const RunConfig& config) {
  SampleSpec spec;
  spec.epsilon = config.epsilon;
  spec.mode = config.mode;
  spec.seed = config.seed;
  spec.initial = config.initial;
  return generate(*ctx.surface, ctx.lfs, ctx.cover, spec);
}

PipelineResult reconstruct(const SurfaceContext& ctx, const RunConfig& config, std::vector<Vec3> sites,
                           std::optional<SampleCertificate> certificate) {
  PipelineResult r;
  r.sites = std::move(sites);
  r.certificate = certificate;
  const ImplicitSurface& s = *ctx.surface;
  auto t = Clock::now();
  const VoronoiComplex vc = voronoi_of(r.sites, voronoi_clip_box(s));
  r.seconds["voronoi"] = since(t);
  t = Clock::now();
  r.rc = restrict_to_surface(vc, s, ctx.lfs, ctx.cover);
  r.seconds["restrict"] = since(t);
  t = Clock::now();
  r.properties = check_properties(r.rc, s);
  r.mesh = dualize(r.rc, s);
  r.topology = validate(r.mesh, s);
  r.seconds["dualize"] = since(t);
  if (config.star_shape) {
    t = Clock::now();
    const double dtheta = config.dtheta_degrees * std::numbers::pi / 180;
    for (std::size_t v = 0; v < r.sites.size(); ++v)
      if (!r.rc.cells()[v].empty())
        r.star_shape.push_back(star_shape_audit(r.rc, static_cast<int>(v), s, ctx.lfs, ctx.cover, dtheta));
    r.seconds["star_shape"] = since(t);
  }
  return r;
}

const std::vector<std::string>& lemma_names() {
  static const std::vector<std::string> names{"abovebelow",       "raybisector",     "normal_variation",
                                              "triangle_normal",  "feature_translation", "vertex_uniqueness",
                                              "edge_structure",   "projection_injectivity"};
  return names;
}

std::vector<AuditResult> run_audits(const SurfaceContext& ctx, const RunConfig& config) {
  AuditConfig ac;
  ac.trials = config.trials;
  ac.seed = config.seed;
  const auto& want = config.lemmas.empty() ? lemma_names() : config.lemmas;
  const ImplicitSurface& s = *ctx.surface;
  std::optional<RestrictedComplex> rc;
  auto complex = [&]() -> const RestrictedComplex& {
    if (!rc) rc = restrict_to_surface(voronoi_of(sample(ctx, config).sites, voronoi_clip_box(s)), s, ctx.lfs, ctx.cover);
    return *rc;
  };
  std::vector<AuditResult> out;
  for (const auto& name : want) {
    if (name == "abovebelow") out.push_back(audit_abovebelow(s, ctx.lfs, ac));
    else if (name == "raybisector") out.push_back(audit_raybisector(s, ctx.lfs, complex(), ac));
    else if (name == "normal_variation") out.push_back(audit_normal_variation(s, ctx.lfs, ac));
    else if (name == "triangle_normal") out.push_back(audit_triangle_normal(s, ctx.lfs, ac));
    else if (name == "feature_translation") out.push_back(audit_feature_translation(s, ctx.lfs, ac));
    else if (name == "vertex_uniqueness") out.push_back(audit_vertex_uniqueness(s, ctx.lfs, complex(), ac));
    else if (name == "edge_structure") out.push_back(audit_edge_structure(s, ctx.lfs, complex(), ac));
    else if (name == "projection_injectivity") out.push_back(audit_projection_injectivity(s, ctx.lfs, ctx.cover, ac));
    else throw ConfigError("unknown lemma '" + name + "'");
  }
  return out;
}

bool report_pass(const PipelineResult& r) {
  if (!r.properties.all_pass() || !r.topology.homeomorphic()) return false;
  return std::all_of(r.star_shape.begin(), r.star_shape.end(), [](const StarShapeResult& s) { return s.pass; });
}

Json run_report(const RunConfig& config, const PipelineResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config.to_json();
  j["sites"] = r.sites.size();
  j["sample"] = r.certificate ? to_json(*r.certificate) : Json(nullptr);
  j["properties"] = to_json(r.properties);
  j["topology"] = to_json(r.topology);
  j["mesh"] = {{"faces", r.mesh.faces.size()}, {"triangles", r.mesh.triangles().size()}, {"edges", r.mesh.edges.size()}};
  if (config.star_shape) {
    Json cells = Json::array();
    int failures = 0, advisory = 0;
    for (const auto& s : r.star_shape) {
      if (!s.pass) {
        ++failures;
        cells.push_back(to_json(s));
      }
      if (s.advisory) ++advisory;
    }
    j["star_shape"] = {{"cells", r.star_shape.size()}, {"failures", failures}, {"advisory", advisory},
                       {"failed_cells", cells}};
  }
  j["pass"] = report_pass(r);
  return j;
}

Json timing_report(const PipelineResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  for (const auto& [k, v] : r.seconds) j["seconds"][k] = v;
  return j;
}

CurveResult run_curve(const RunConfig& config) {
  const auto c = make_curve(config.curve, config.params);
  const auto cover = curve_cover(*c, config.curve_cover);
  CurveSampleSpec spec;
  spec.epsilon = config.epsilon;
  spec.seed = config.seed;
  CurveResult r;
  r.sample = generate_curve_sample(*c, cover, spec);
  r.rdt = rdt2d(r.sample.sites, *c);
  r.polygon = verify_polygon(r.rdt, *c);
  return r;
}

Json curve_report(const RunConfig& config, const CurveResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = config.to_json();
  j["sample"] = to_json(r.sample.certificate);
  j["edges"] = r.rdt.edges.size();
  j["polygon"] = to_json(r.polygon);
  j["pass"] = r.polygon.valid();
  return j;
}

}  // namespace rdt
