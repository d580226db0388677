#include "rdt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rdt {

double fixed(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

Json number(double x) {
  if (std::isfinite(x)) return fixed(x);
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

void full_precision(std::ostream& out) { out << std::setprecision(std::numeric_limits<double>::max_digits10); }

}  // namespace

void write_xyz(std::ostream& out, const std::vector<Vec3>& points) {
  full_precision(out);
  for (const Vec3& p : points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

std::vector<Vec3> read_xyz(std::istream& in) {
  std::vector<Vec3> pts;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x)) continue;
    if (!(ls >> y >> z)) throw IoError("xyz line " + std::to_string(n) + ": expected three coordinates");
    std::string rest;
    if (ls >> rest) throw IoError("xyz line " + std::to_string(n) + ": trailing text '" + rest + "'");
    pts.emplace_back(x, y, z);
  }
  return pts;
}

std::vector<Vec3> read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_xyz(in);
}

void write_off(std::ostream& out, const RdtMesh& mesh) {
  full_precision(out);
  out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << ' ' << mesh.edges.size() << '\n';
  for (int v : mesh.vertices) {
    const Vec3& p = mesh.sites[static_cast<std::size_t>(v)];
    out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  }
  std::vector<int> index(mesh.sites.size(), -1);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) index[static_cast<std::size_t>(mesh.vertices[i])] = static_cast<int>(i);
  for (const auto& f : mesh.faces) {
    out << f.size();
    for (int v : f) out << ' ' << index[static_cast<std::size_t>(v)];
    out << '\n';
  }
}

void write_obj(std::ostream& out, const RdtMesh& mesh) {
  full_precision(out);
  std::vector<int> index(mesh.sites.size(), -1);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.sites[static_cast<std::size_t>(mesh.vertices[i])];
    out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    index[static_cast<std::size_t>(mesh.vertices[i])] = static_cast<int>(i) + 1;
  }
  for (const auto& f : mesh.faces) {
    out << 'f';
    for (int v : f) out << ' ' << index[static_cast<std::size_t>(v)];
    out << '\n';
  }
}

void write_polyline_obj(std::ostream& out, const RestrictedComplex& rc) {
  full_precision(out);
  int base = 1;
  for (const auto& e : rc.edges()) {
    if (e.polyline.empty()) continue;
    out << "o face" << e.face << '\n';
    for (const Vec3& p : e.polyline) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    out << 'l';
    for (std::size_t i = 0; i < e.polyline.size(); ++i) out << ' ' << base + static_cast<int>(i);
    if (e.closed) out << ' ' << base;
    out << '\n';
    base += static_cast<int>(e.polyline.size());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json to_json(const Vec3& p) { return Json::array({number(p.x()), number(p.y()), number(p.z())}); }
Json to_json(const Vec2& p) { return Json::array({number(p.x()), number(p.y())}); }

Json to_json(const SampleCertificate& c) {
  return {{"mode", to_string(c.mode)},
          {"epsilon", number(c.epsilon)},
          {"epsilon_bound", number(c.epsilon_bound)},
          {"refined", c.refined},
          {"witness", to_json(c.witness)},
          {"witness_site", c.witness_site},
          {"site_count", c.site_count},
          {"cover_spacing", number(c.cover_spacing)},
          {"cover_points", c.cover_points}};
}

Json to_json(const PropertyReport& r) {
  Json w = Json::array();
  for (const auto& x : r.witnesses)
    w.push_back({{"property", x.property}, {"what", x.what}, {"id", x.id}, {"point", to_json(x.point)},
                 {"value", number(x.value)}});
  return {{"A", r.A},
          {"B", r.B},
          {"C", r.C},
          {"D", r.D},
          {"E", to_string(r.E)},
          {"F", to_string(r.F)},
          {"all_pass", r.all_pass()},
          {"min_face_margin", number(r.min_face_margin)},
          {"min_edge_margin", number(r.min_edge_margin)},
          {"nonempty_cells", r.nonempty_cells},
          {"nonempty_faces", r.nonempty_faces},
          {"restricted_vertices", r.restricted_vertex_count},
          {"symbolic_vertices", r.symbolic_vertices},
          {"witnesses", w}};
}

Json to_json(const TopologyReport& r) {
  Json inc = Json::object();
  for (const auto& [k, n] : r.edge_incidence) inc[std::to_string(k)] = n;
  Json comps = Json::array();
  for (const auto& c : r.components)
    comps.push_back({{"surface_component", c.surface_component},
                     {"vertices", c.vertices},
                     {"edges", c.edges},
                     {"faces", c.faces},
                     {"euler", c.euler},
                     {"expected_euler", c.expected_euler}});
  return {{"vertices", r.vertex_count},
          {"edges", r.edge_count},
          {"faces", r.face_count},
          {"edge_incidence", inc},
          {"edge_manifold", r.edge_manifold},
          {"vertex_manifold", r.vertex_manifold},
          {"manifold", r.manifold},
          {"orientable", r.orientable},
          {"coherently_oriented", r.coherently_oriented},
          {"components", r.component_count},
          {"expected_components", r.expected_components},
          {"euler", r.euler},
          {"expected_euler", r.expected_euler},
          {"per_component", comps},
          {"euler_match", r.euler_match},
          {"component_match", r.component_match},
          {"degenerate", r.degenerate},
          {"homeomorphic", r.homeomorphic()}};
}

Json to_json(const AuditResult& r) {
  Json w = Json::array();
  for (const auto& x : r.witnesses)
    w.push_back({{"trial", x.trial}, {"what", x.what}, {"p", to_json(x.p)}, {"q", to_json(x.q)},
                 {"margin", number(x.margin)}});
  return {{"audit", r.audit},
          {"surface", r.surface},
          {"trials", r.trials},
          {"passed", r.passed},
          {"counterexamples", r.counterexamples},
          {"skipped", r.skipped},
          {"worst_margin", number(r.worst_margin)},
          {"pass", r.pass()},
          {"witnesses", w}};
}

Json to_json(const StarShapeResult& r) {
  Json f = Json::array();
  for (const auto& x : r.failures) f.push_back({{"theta", number(x.theta)}, {"what", x.what}, {"point", to_json(x.point)}});
  double lmin = std::numeric_limits<double>::infinity(), lmax = 0;
  for (double l : r.profile) {
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  return {{"site", r.site},
          {"pass", r.pass},
          {"advisory", r.advisory},
          {"ratio", number(r.ratio)},
          {"angles", r.profile.size()},
          {"l_min", number(lmin)},
          {"l_max", number(lmax)},
          {"max_jump", number(r.max_jump)},
          {"jump_tolerance", number(r.jump_tolerance)},
          {"refinements", r.refinements},
          {"cover_points_checked", r.cover_points_checked},
          {"failures", f}};
}

Json to_json(const SixSitesReport& r) {
  return {{"cells_per_component", r.cells_per_component},
          {"sites_per_component", r.sites_per_component},
          {"voronoi_ratio", number(r.voronoi_ratio)},
          {"xi_condition", r.xi_condition},
          {"contradiction", r.contradiction}};
}

Json to_json(const CurveCertificate& c) {
  return {{"epsilon", number(c.epsilon)},
          {"epsilon_bound", number(c.epsilon_bound)},
          {"witness_theta", number(c.witness_theta)},
          {"site_count", c.site_count}};
}

Json to_json(const PolygonReport& r) {
  Json w = Json::array();
  for (const auto& x : r.witnesses) w.push_back({{"what", x.what}, {"site", x.site}, {"point", to_json(x.point)}});
  return {{"valid", r.valid()},
          {"all_degree_two", r.all_degree_two},
          {"single_hits", r.single_hits},
          {"cycles", r.cycles},
          {"expected_components", r.expected_components},
          {"witnesses", w}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace rdt
