#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "stacc/cube.hpp"
#include "stacc/pipeline.hpp"
#include "stacc/server.hpp"

using namespace stacc;
using nlohmann::json;

namespace {

const std::filesystem::path kMiniCity = std::filesystem::path(STACC_DATA_DIR) / "minicity";

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / "stacc_pipeline_tests" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

RunConfig minicity(const std::string& out)
{
  RunConfig c = load_config(kMiniCity / "config.json");
  c.output = scratch(out);
  return c;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_issue(const ValidationReport& r, Severity sev, const std::string& needle)
{
  for (const auto& i : r.issues) {
    if (i.severity == sev && i.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(STACC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing")
{
  const RunConfig c = parse_config(R"({"zones": "z.geojson", "beta": "calibrate", "cell_size": 250})", "/data");
  CHECK(c.zones == std::filesystem::path("/data/z.geojson"));
  CHECK(c.calibrate());
  CHECK(c.cell_size == 250.0);
  CHECK(parse_config(R"({"beta": 0.6})", "/").beta == 0.6);
  CHECK_THROWS_WITH(parse_config(R"({"bogus": 1})", "/"), doctest::Contains("bogus"));
  CHECK_THROWS_AS(parse_config(R"({"beta": "fast"})", "/"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[1,", "/"), std::invalid_argument);
}

TEST_CASE("the mini-city fixture validates cleanly")
{
  const ValidationReport r = validate(minicity("validate"));
  CHECK(r.error_count() == 0);
}

TEST_CASE("validation errors and warnings")
{
  SUBCASE("missing parcel file stops the run before any compute")
  {
    RunConfig c = minicity("no_parcels");
    c.parcels = kMiniCity / "nope.geojson";
    CHECK(has_issue(validate(c), Severity::error, "parcels file not found"));
    CHECK_THROWS_AS(run_pipeline(c), ValidationFailed);
    CHECK_FALSE(std::filesystem::exists(c.output));
  }
  SUBCASE("calibrating without flows")
  {
    RunConfig c = minicity("no_flows");
    c.flows.clear();
    CHECK(has_issue(validate(c), Severity::error, "calibrate"));
  }
  SUBCASE("bad parameters")
  {
    RunConfig c = minicity("params");
    c.cell_size = 0;
    c.beta = -1.0;
    const ValidationReport r = validate(c);
    CHECK(has_issue(r, Severity::error, "cell_size"));
    CHECK(has_issue(r, Severity::error, "beta"));
  }

  const auto dir = scratch("validation_inputs");
  std::filesystem::create_directories(dir);
  SUBCASE("counts naming an unknown zone")
  {
    RunConfig c = minicity("unknown_zone");
    std::ofstream(dir / "workers.csv") << slurp(c.workers) << "Z99,0,60,5\n";
    c.workers = dir / "workers.csv";
    CHECK(has_issue(validate(c), Severity::error, "Z99"));
  }
  SUBCASE("parcels without residential land use")
  {
    RunConfig c = minicity("no_residential");
    json parcels = json::parse(slurp(c.parcels));
    for (auto& f : parcels["features"]) {
      if (f["properties"]["land_use"] == "residential") f["properties"]["land_use"] = "commercial";
    }
    std::ofstream(dir / "parcels.geojson") << parcels.dump();
    c.parcels = dir / "parcels.geojson";
    const ValidationReport r = validate(c);
    CHECK(r.error_count() == 0);
    CHECK(has_issue(r, Severity::warning, "no residential"));
  }
  SUBCASE("geographic coordinates are refused")
  {
    RunConfig c = minicity("geographic");
    json zones = json::parse(slurp(c.zones));
    zones["crs"]["properties"]["name"] = "urn:ogc:def:crs:OGC:1.3:CRS84";
    std::ofstream(dir / "zones.geojson") << zones.dump();
    c.zones = dir / "zones.geojson";
    CHECK(has_issue(validate(c), Severity::error, "geographic"));
  }
}

TEST_CASE("mini-city run matches the golden values")
{
  const RunConfig c = minicity("golden");
  const json report = json::parse(run_pipeline(c));
  const json golden = json::parse(slurp(kMiniCity / "golden.json"));
  const json& st = report["stages"];

  CHECK(rel(st["calibrate"]["beta"].get<double>(), golden["beta"].get<double>()) <= 1e-9);
  CHECK(st["dasymetric"]["mass_in"]["workers"].get<double>() == golden["mass_in"]["workers"].get<double>());
  CHECK(st["dasymetric"]["mass_in"]["jobs"].get<double>() == golden["mass_in"]["jobs"].get<double>());
  CHECK(rel(st["dasymetric"]["mass_out"]["workers"].get<double>(), golden["mass_in"]["workers"].get<double>()) <= 1e-9);
  CHECK(st["access"]["residential_cells"] == golden["residential_cells"]);
  for (int s = 0; s < 4; ++s) {
    CHECK(rel(st["access"]["means"][s].get<double>(), golden["means"][s].get<double>()) <= 1e-9);
  }
  CHECK(st["cube"]["nx"] == 20);
  CHECK(st["cube"]["ny"] == 20);
  CHECK(st["cube"]["nt"] == 24);
  CHECK(st["cube"]["mesh_triangles"].get<int>() > 0);

  for (const char* f : {"zone_workers.csv", "grid.json", "cells.csv", "od_static.stm", "calibration.json",
                        "surfaces_s1.csv", "surfaces_s4.csv", "cube.stc", "isosurface.obj", "slices/slice_06.csv",
                        "timings.json"}) {
    CHECK_MESSAGE(std::filesystem::exists(c.output / f), f);
  }
  const SpaceTimeCube cube = read_cube(c.output / artifact::cube);
  CHECK(cube.nx() == 20);
  CHECK(cube.transform == "log1p");
}

TEST_CASE("two runs are byte-identical, whatever the thread count")
{
  RunConfig a = minicity("det_a"), b = minicity("det_b");
  a.threads = 1;
  b.threads = 4;
  const std::string ra = run_pipeline(a), rb = run_pipeline(b);
  CHECK(ra == rb);
  CHECK(slurp(a.output / artifact::report) == slurp(b.output / artifact::report));
  CHECK(slurp(a.output / artifact::cube) == slurp(b.output / artifact::cube));
  CHECK(slurp(a.output / artifact::mesh) == slurp(b.output / artifact::mesh));
}

TEST_CASE("stages run one at a time reproduce the full run")
{
  const RunConfig full = minicity("staged_full");
  const std::string expected = run_pipeline(full);
  const RunConfig staged = minicity("staged");
  for (const char* s : {"temporal", "grid", "dasymetric", "odmatrix", "calibrate", "access", "cube"}) run_stage(s, staged);
  CHECK(assemble_report(staged) == expected);
  CHECK(slurp(staged.output / artifact::cube) == slurp(full.output / artifact::cube));

  const RunConfig fresh = minicity("out_of_order");
  try {
    run_stage("access", fresh);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "access");
    CHECK(std::string(e.what()).find("missing artifact") != std::string::npos);
  }
  CHECK_THROWS_AS(run_stage("paint", fresh), std::invalid_argument);
}

TEST_CASE("hourly travel times from the edge file")
{
  RunConfig c = minicity("hourly");
  c.hourly_from_edges = true;
  c.beta = 1.2;
  const json report = json::parse(run_pipeline(c));
  CHECK(report["stages"]["odmatrix"]["hourly_matrices"] == "edges");
  const auto hourly = load_time_varying_costs((c.output / artifact::od_hourly).string());
  CHECK(hourly[8].unit == "s");
  // Peak-hour trips take longer than night trips between the same cells.
  double night = 0, peak = 0;
  for (std::size_t k = 0; k < hourly[3].values.size(); ++k) {
    night += hourly[3].values[k];
    peak += hourly[8].values[k];
  }
  CHECK(peak > night);
  CHECK(report["parameters"]["time_varying"] == true);
}

TEST_CASE("artifact server")
{
  const RunConfig c = minicity("serve");
  run_pipeline(c);
  ArtifactServer server(c.output);
  const int port = server.bind("127.0.0.1", 0);
  std::thread thread([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  for (int i = 0; i < 100 && !client.Get("/grid.json"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  const auto full = client.Get("/cube.stc");
  REQUIRE(full);
  CHECK(full->status == 200);
  CHECK(full->body == slurp(c.output / artifact::cube));
  CHECK(full->get_header_value("Content-Type") == "application/octet-stream");

  const auto head = client.Get("/cube.stc", {{"Range", "bytes=0-7"}});
  REQUIRE(head);
  CHECK(head->status == 206);
  CHECK(head->body == "STCUBE01");

  const auto report = client.Get("/run_report.json");
  REQUIRE(report);
  CHECK(report->status == 200);
  CHECK(report->get_header_value("Content-Type") == "application/json");

  const auto missing = client.Get("/missing");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  thread.join();

  CHECK_THROWS_AS(ArtifactServer(c.output / "not-there"), std::runtime_error);
}

TEST_CASE("command-line exit codes")
{
  const std::string config = (kMiniCity / "config.json").string();
  const auto out = scratch("cli");
  CHECK(run_cli("validate -c " + config) == 0);
  CHECK(run_cli("run -c " + config + " -o " + out.string()) == 0);
  CHECK(std::filesystem::exists(out / "cube.stc"));
  CHECK(run_cli("validate -c " + config + " --parcels /nonexistent.geojson") == 1);
  CHECK(run_cli("run -c " + config + " --beta calibrate --flows /nonexistent.csv -o " + out.string()) == 1);
  CHECK(run_cli("access -c " + config + " -o " + scratch("cli_fresh").string()) == 2);
  CHECK(run_cli("cube -c " + config + " -o " + out.string()) == 0);
}
