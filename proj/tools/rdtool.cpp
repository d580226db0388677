#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rdt/pipeline.hpp"

using namespace rdt;
namespace fs = std::filesystem;

namespace {

constexpr int kFailure = 2;
constexpr int kError = 1;

struct Flag {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::string> params;
  std::vector<std::unique_ptr<Flag>> flags;
  bool force = false;
  bool star_shape = false;
};

void add_flag(Command& c, const std::string& name, const std::string& key, const std::string& help) {
  auto& store = c.flags;
  store.push_back(std::make_unique<Flag>(Flag{key, "", nullptr}));
  store.back()->option = c.app->add_option(name, store.back()->value, help);
}

RunConfig resolve(const Command& c) {
  RunConfig config;
  if (!c.config_file.empty()) config.load(read_text(c.config_file));
  for (const auto& f : c.flags)
    if (f->option->count() > 0) config.set(f->key, f->value);
  for (const auto& p : c.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value, got '" + p + "'");
    config.set("param." + p.substr(0, eq), p.substr(eq + 1));
  }
  if (c.force) config.force = true;
  if (c.star_shape) config.star_shape = true;
  config.validate();
  return config;
}

fs::path prepare_output(const RunConfig& config) {
  const fs::path dir(config.output);
  if (fs::exists(dir) && !fs::is_directory(dir)) throw IoError("output '" + dir.string() + "' is not a directory");
  if (fs::exists(dir) && !fs::is_empty(dir) && !config.force)
    throw IoError("output directory '" + dir.string() + "' is not empty; pass --force to overwrite");
  fs::create_directories(dir);
  write_text(dir / "run_config.json", dump(config.to_json()));
  return dir;
}

template <class F>
void write_file(const fs::path& path, F&& f) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  f(out);
  if (!out) throw IoError("write failed: " + path.string());
}

int cmd_sample(const RunConfig& config) {
  if (!config.curve.empty()) {
    const auto r = run_curve(config);
    const fs::path dir = prepare_output(config);
    std::vector<Vec3> pts;
    for (const Vec2& p : r.sample.sites) pts.emplace_back(p.x(), p.y(), 0);
    write_file(dir / "sample.xyz", [&](std::ostream& o) { write_xyz(o, pts); });
    Json side{{"schema_version", kSchemaVersion}, {"config", config.to_json()},
              {"certificate", to_json(r.sample.certificate)}};
    write_text(dir / "sample.json", dump(side));
    std::cout << dump(side);
    return 0;
  }
  const auto ctx = make_context(config);
  const SiteSet s = sample(ctx, config);
  const fs::path dir = prepare_output(config);
  write_file(dir / "sample.xyz", [&](std::ostream& o) { write_xyz(o, s.sites); });
  Json side{{"schema_version", kSchemaVersion}, {"config", config.to_json()}, {"certificate", to_json(s.certificate)}};
  write_text(dir / "sample.json", dump(side));
  std::cout << dump(side);
  return 0;
}

int cmd_rdt(const RunConfig& config) {
  if (!config.curve.empty()) {
    const auto r = run_curve(config);
    const fs::path dir = prepare_output(config);
    const auto c = make_curve(config.curve, config.params);
    write_file(dir / "rdt.svg", [&](std::ostream& o) { write_svg(o, *c, r.rdt); });
    const Json j = curve_report(config, r);
    write_text(dir / "report.json", dump(j));
    std::cout << dump(j);
    return r.polygon.valid() ? 0 : kFailure;
  }
  const auto ctx = make_context(config);
  PipelineResult r;
  if (config.input.empty()) {
    const SiteSet s = sample(ctx, config);
    r = reconstruct(ctx, config, s.sites, s.certificate);
  } else {
    r = reconstruct(ctx, config, read_xyz(fs::path(config.input)));
  }
  const fs::path dir = prepare_output(config);
  write_file(dir / "mesh.off", [&](std::ostream& o) { write_off(o, r.mesh); });
  write_file(dir / "mesh.obj", [&](std::ostream& o) { write_obj(o, r.mesh); });
  write_file(dir / "restricted_edges.obj", [&](std::ostream& o) { write_polyline_obj(o, r.rc); });
  const Json j = run_report(config, r);
  write_text(dir / "report.json", dump(j));
  write_text(dir / "timing.json", dump(timing_report(r)));
  std::cout << dump(j);
  return report_pass(r) ? 0 : kFailure;
}

int cmd_verify(const RunConfig& config) {
  if (config.input.empty()) throw ConfigError("verify needs --input");
  const auto sites = read_xyz(fs::path(config.input));
  const auto ctx = make_context(config);
  SampleCertificate c;
  if (config.mode == SampleMode::eps_sample) {
    c = verify_eps_sample(sites, *ctx.surface, ctx.lfs, ctx.cover.cover);
  } else {
    const auto rc = restrict_to_surface(voronoi_of(sites, voronoi_clip_box(*ctx.surface)), *ctx.surface, ctx.lfs,
                                        ctx.cover);
    c = verify_eps_voronoi_sample(rc, *ctx.surface, ctx.lfs);
  }
  const bool pass = c.epsilon <= config.epsilon;
  Json j{{"schema_version", kSchemaVersion}, {"config", config.to_json()}, {"certificate", to_json(c)},
         {"pass", pass}};
  const fs::path dir = prepare_output(config);
  write_text(dir / "verify.json", dump(j));
  std::cout << dump(j);
  return pass ? 0 : kFailure;
}

int cmd_audit(const RunConfig& config) {
  const auto ctx = make_context(config);
  const auto results = run_audits(ctx, config);
  Json j{{"schema_version", kSchemaVersion}, {"config", config.to_json()}};
  j["audits"] = Json::array();
  bool pass = true;
  for (const auto& a : results) {
    j["audits"].push_back(to_json(a));
    pass = pass && a.pass();
  }
  j["pass"] = pass;
  const fs::path dir = prepare_output(config);
  write_text(dir / "audit.json", dump(j));
  std::cout << dump(j);
  return pass ? 0 : kFailure;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& output, bool force) {
  Json summary{{"schema_version", kSchemaVersion}, {"runs", Json::array()}};
  bool pass = true;
  for (const auto& d : dirs) {
    for (const char* name : {"report.json", "audit.json", "verify.json"}) {
      const fs::path p = fs::path(d) / name;
      if (!fs::exists(p)) continue;
      Json j;
      try {
        j = Json::parse(read_text(p));
      } catch (const Json::parse_error& e) {
        throw IoError(p.string() + ": " + e.what());
      }
      const bool ok = j.value("pass", false);
      pass = pass && ok;
      Json run{{"path", p.string()}, {"pass", ok}};
      if (j.contains("topology")) run["topology"] = j["topology"];
      if (j.contains("properties")) run["properties"] = j["properties"];
      if (j.contains("audits")) {
        Json a = Json::array();
        for (const auto& x : j["audits"]) a.push_back({{"audit", x["audit"]}, {"counterexamples", x["counterexamples"]}});
        run["audits"] = a;
      }
      summary["runs"].push_back(run);
    }
  }
  if (summary["runs"].empty()) throw IoError("no reports found");
  summary["pass"] = pass;
  if (!output.empty()) {
    if (fs::exists(output) && !force) throw IoError("'" + output + "' exists; pass --force to overwrite");
    write_text(output, dump(summary));
  }
  std::cout << dump(summary);
  return pass ? 0 : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restricted Delaunay triangulation workbench"};
  app.require_subcommand(1);
  std::map<std::string, Command> commands;
  const std::vector<std::pair<std::string, std::string>> subs{
      {"sample", "Generate and certify a sample"},
      {"rdt", "Reconstruct and validate the restricted Delaunay triangulation"},
      {"verify", "Certify an existing sample"},
      {"audit", "Run seeded lemma audits"}};
  for (const auto& [name, help] : subs) {
    Command& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.config_file, "key = value configuration file");
    c.app->add_option("--param", c.params, "surface or curve parameter name=value");
    c.app->add_flag("--force", c.force, "overwrite an existing output directory");
    add_flag(c, "--surface", "surface", "catalog surface name");
    add_flag(c, "--curve", "curve", "plane curve name (circle, ellipse, flower)");
    add_flag(c, "--mode", "mode", "eps-sample or eps-voronoi-sample");
    add_flag(c, "--eps", "epsilon", "sampling parameter");
    add_flag(c, "--seed", "seed", "random seed");
    add_flag(c, "--initial", "initial", "initial site: random or first");
    add_flag(c, "--cover", "cover", "cover spacing");
    add_flag(c, "--input", "input", "XYZ site file");
    add_flag(c, "--out", "output", "output directory");
    add_flag(c, "--trials", "trials", "audit trials");
    add_flag(c, "--lemmas", "lemmas", "comma-separated audit names");
    add_flag(c, "--dtheta", "dtheta", "star-shape angular resolution in degrees");
  }
  commands["rdt"].app->add_flag("--star-shape", commands["rdt"].star_shape, "audit every restricted cell");
  auto* report = app.add_subcommand("report", "Aggregate JSON reports from output directories");
  std::vector<std::string> dirs;
  std::string report_out;
  bool report_force = false;
  report->add_option("dirs", dirs, "output directories")->required();
  report->add_option("--out", report_out, "summary JSON file");
  report->add_flag("--force", report_force, "overwrite the summary file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kError;
  }
  try {
    if (report->parsed()) return cmd_report(dirs, report_out, report_force);
    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      const RunConfig config = resolve(c);
      if (name == "sample") return cmd_sample(config);
      if (name == "rdt") return cmd_rdt(config);
      if (name == "audit") return cmd_audit(config);
      return cmd_verify(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
