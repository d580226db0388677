#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdt/curves2d.hpp"
#include "rdt/lemma_audit.hpp"
#include "rdt/radial.hpp"
#include "rdt/rdt_mesh.hpp"
#include "rdt/sampling.hpp"

namespace rdt {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Twelve significant digits, so reports do not depend on last-bit noise.
double fixed(double x);

void write_xyz(std::ostream& out, const std::vector<Vec3>& points);
std::vector<Vec3> read_xyz(std::istream& in);
std::vector<Vec3> read_xyz(const std::filesystem::path& path);

/// Polygonal faces, vertex coordinates at full precision.
void write_off(std::ostream& out, const RdtMesh& mesh);
void write_obj(std::ostream& out, const RdtMesh& mesh);
/// Traced restricted edges as OBJ line elements.
void write_polyline_obj(std::ostream& out, const RestrictedComplex& rc);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

Json to_json(const Vec3& p);
Json to_json(const Vec2& p);
Json to_json(const SampleCertificate& c);
Json to_json(const PropertyReport& r);
Json to_json(const TopologyReport& r);
Json to_json(const AuditResult& r);
Json to_json(const StarShapeResult& r);
Json to_json(const SixSitesReport& r);
Json to_json(const CurveCertificate& c);
Json to_json(const PolygonReport& r);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace rdt
