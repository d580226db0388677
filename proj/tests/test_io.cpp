#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "rdt/pipeline.hpp"

using namespace rdt;

namespace {

const std::vector<Vec3> kOctahedron = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0),
                                       Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)};

}  // namespace

TEST_CASE("xyz round trip") {
  const std::vector<Vec3> p{Vec3(0.1, -2.5e-17, 3), Vec3(1.0 / 3, std::sqrt(2.0), -7)};
  std::stringstream s;
  write_xyz(s, p);
  const auto q = read_xyz(s);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == p[0]);
  CHECK(q[1] == p[1]);

  std::istringstream c("# header\n1 2 3\n\n  4 5 6 # tail\n");
  CHECK(read_xyz(c).size() == 2);
  std::istringstream bad("1 2 3\n1 2\n");
  CHECK_THROWS_WITH_AS(read_xyz(bad), doctest::Contains("line 2"), IoError);
  CHECK_THROWS_AS(read_xyz(std::filesystem::path("/nonexistent/sites.xyz")), IoError);
}

TEST_CASE("mesh formats") {
  const RunConfig config;
  const auto ctx = make_context(config);
  const auto r = reconstruct(ctx, config, kOctahedron);
  std::stringstream off, obj, lines;
  write_off(off, r.mesh);
  write_obj(obj, r.mesh);
  write_polyline_obj(lines, r.rc);
  std::string magic;
  int nv = 0, nf = 0, ne = 0;
  off >> magic >> nv >> nf >> ne;
  CHECK(magic == "OFF");
  CHECK(nv == 6);
  CHECK(nf == 8);
  const std::string o = obj.str();
  CHECK(std::count(o.begin(), o.end(), 'v') >= 6);
  int faces = 0;
  std::istringstream ol(o);
  for (std::string line; std::getline(ol, line);)
    if (line.rfind("f ", 0) == 0) ++faces;
  CHECK(faces == 8);
  int segments = 0;
  std::istringstream pl(lines.str());
  for (std::string line; std::getline(pl, line);)
    if (line.rfind("l ", 0) == 0) ++segments;
  CHECK(segments == 12);
}

TEST_CASE("json numbers") {
  CHECK(fixed(0.1 + 0.2) == 0.3);
  CHECK(fixed(1.0 / 3) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  Json j = to_json(Vec3(std::numeric_limits<double>::infinity(), std::nan(""), 1));
  CHECK(j[0] == "inf");
  CHECK(j[1] == "nan");
  CHECK(j[2] == 1.0);
}

TEST_CASE("config parsing") {
  RunConfig c;
  c.load("# comment\nsurface = torus\nparam.R = 3 # major\neps=0.25\nseed = 7\nlemmas = abovebelow, raybisector\n");
  CHECK(c.surface == "torus");
  CHECK(c.params.at("R") == 3);
  CHECK(c.epsilon == 0.25);
  CHECK(c.seed == 7);
  CHECK(c.lemmas.size() == 2);
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(c.set("colour", "red"), ConfigError);
  CHECK_THROWS_AS(c.set("eps", "small"), ConfigError);
  CHECK_THROWS_AS(c.load("surface torus\n"), ConfigError);

  RunConfig bad;
  bad.surface = "klein_bottle";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.lemmas = {"nope"};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("projection_injectivity"), ConfigError);
  bad = RunConfig{};
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  RunConfig round;
  const Json cj = c.to_json();
  for (const auto& [k, v] : cj.items()) {
    if (k == "params") {
      for (const auto& [pk, pv] : v.items()) round.set("param." + pk, std::to_string(pv.get<double>()));
    } else if (k == "lemmas") {
      std::string list;
      for (const auto& l : v) list += l.get<std::string>() + ",";
      round.set(k, list);
    } else if (v.is_string()) {
      round.set(k, v.get<std::string>());
    } else if (v.is_boolean()) {
      round.set(k, v.get<bool>() ? "true" : "false");
    } else {
      std::ostringstream s;
      s.precision(17);
      s << v.get<double>();
      round.set(k, s.str());
    }
  }
  CHECK(dump(round.to_json()) == dump(c.to_json()));
}

TEST_CASE("deterministic reports") {
  RunConfig config;
  config.epsilon = 0.4;
  config.seed = 5;
  const auto ctx = make_context(config);
  std::string first;
  for (int k = 0; k < 2; ++k) {
    const auto s = sample(ctx, config);
    const auto r = reconstruct(ctx, config, s.sites, s.certificate);
    CHECK(report_pass(r));
    const std::string text = dump(run_report(config, r));
    if (k == 0) first = text;
    else CHECK(text == first);
    CHECK(timing_report(r).contains("seconds"));
  }
  const Json j = Json::parse(first);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["topology"].is_object());
}

TEST_CASE("curve pipeline") {
  RunConfig config;
  config.curve = "flower";
  config.epsilon = 0.3;
  config.validate();
  const auto r = run_curve(config);
  CHECK(r.polygon.valid());
  CHECK(curve_report(config, r)["pass"] == true);
}
