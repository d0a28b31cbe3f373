#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "encl/config.hpp"
#include "encl/reconstruct.hpp"
#include "encl/errors.hpp"
#include "encl/io.hpp"

using namespace encl;
using nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "scene": {
      "obstacle": {"shape": {"type": "sphere", "center": [0,0,0], "radius": 1.0},
                   "kind": "sound_hard"},
      "surface": {"type": "sphere", "center": [0,0,0], "radius": 3.0},
      "grid": {"h": 0.25}
    },
    "probes": [{"center": [6,0,0], "radius": 0.5, "amplitude": 1.0}],
    "solver": {"T": 8.125, "sponge": {"thickness": 6}}
  })");
}

std::string error_message(const json& j) {
  try {
    RunConfig::from_json(j, "cfg");
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config parses with defaults") {
  RunConfig cfg = RunConfig::from_json(minimal_config(), "cfg");
  CHECK(cfg.obstacle.has_value());
  CHECK(cfg.obstacle->sound_hard);
  CHECK(cfg.surface.has_value());
  CHECK(cfg.probes.size() == 1);
  CHECK(cfg.solver.T == doctest::Approx(8.125));
  CHECK_FALSE(cfg.solver.t_auto);
  CHECK(cfg.tau.count == 9);
  CHECK(cfg.mode == IndicatorMode::Reference);
}

TEST_CASE("schema errors name the offending field") {
  json j = minimal_config();
  j["scene"].erase("grid");
  CHECK(error_message(j).find("cfg.scene.grid") != std::string::npos);

  j = minimal_config();
  j["scene"]["obstacle"].erase("kind");
  CHECK(error_message(j).find("obstacle.kind") != std::string::npos);

  j = minimal_config();
  j["probes"] = json::array();
  CHECK(error_message(j).find("cfg.probes") != std::string::npos);

  j = minimal_config();
  j["scene"]["obstacle"]["kind"] = "penetrable";
  CHECK(error_message(j).find("contrast") != std::string::npos);

  j = minimal_config();
  j["tau"] = {{"spacing", "cubic"}};
  CHECK(error_message(j).find("tau.spacing") != std::string::npos);
}

TEST_CASE("parse errors carry a line number") {
  const char* path = "bad_config_for_test.json";
  {
    std::ofstream f(path);
    f << "{\n  \"scene\": {\n  oops\n}\n";
  }
  std::string msg;
  try {
    RunConfig::from_file(path);
  } catch (const Error& e) {
    msg = e.what();
  }
  std::remove(path);
  CHECK(msg.find(":3") != std::string::npos);
}

TEST_CASE("resolved echo is a fixed point") {
  RunConfig cfg = RunConfig::from_json(minimal_config(), "cfg");
  json echo = cfg.to_json();
  RunConfig cfg2 = RunConfig::from_json(echo, "echo");
  CHECK(cfg2.to_json().dump() == echo.dump());
}

TEST_CASE("tau grids") {
  TauSpec lin{2.0, 10.0, 5, false};
  auto lv = lin.values();
  CHECK(lv.size() == 5);
  CHECK(lv[0] == doctest::Approx(2.0));
  CHECK(lv[2] == doctest::Approx(6.0));
  CHECK(lv[4] == doctest::Approx(10.0));
  TauSpec geo{1.0, 16.0, 5, true};
  auto gv = geo.values();
  CHECK(gv[1] / gv[0] == doctest::Approx(2.0));
  CHECK(gv[4] == doctest::Approx(16.0));
  TauSpec one{3.0, 9.0, 1, false};
  CHECK(one.values() == std::vector<double>{3.0});
}

TEST_CASE("probe generators") {
  json j = minimal_config();
  j["probes"] = {{"placement", "axes"}, {"distance", 1.9}, {"radius", 0.3}};
  RunConfig cfg = RunConfig::from_json(j, "cfg");
  CHECK(cfg.probes.size() == 6);
  for (const auto& p : cfg.probes)
    CHECK(p.center.norm() == doctest::Approx(1.9));

  j["probes"] = {{"placement", "fibonacci"}, {"count", 26}, {"distance", 2.0},
                 {"radius", 0.25}};
  cfg = RunConfig::from_json(j, "cfg");
  CHECK(cfg.probes.size() == 26);
}

TEST_CASE("scene constraints are enforced") {
  json j = minimal_config();
  j["scene"]["obstacle"]["shape"]["radius"] = 2.95;  // hugging the surface
  RunConfig cfg = RunConfig::from_json(j, "cfg");
  CHECK_THROWS_AS(build_scene(cfg), Error);

  j = minimal_config();
  j["probes"][0]["center"] = {3.2, 0.0, 0.0};  // ball touches the surface
  cfg = RunConfig::from_json(j, "cfg");
  CHECK_THROWS_AS(build_scene(cfg), Error);
}

TEST_CASE("observation window resolution") {
  json j = minimal_config();
  RunConfig cfg = RunConfig::from_json(j, "cfg");
  CHECK(resolve_T(cfg, cfg.probes[0]) == doctest::Approx(8.125));

  j["solver"]["T"] = "auto";
  j["solver"]["T_factor"] = 1.25;
  cfg = RunConfig::from_json(j, "cfg");
  // 2 dist(D,B) - dist(Omega,B) = 9 - 2.5 = 6.5, scaled by 1.25.
  CHECK(resolve_T(cfg, cfg.probes[0]) == doctest::Approx(1.25 * 6.5).epsilon(1e-12));

  j["scene"].erase("obstacle");
  j["solver"]["distance_bound"] = 5.0;
  cfg = RunConfig::from_json(j, "cfg");
  CHECK(resolve_T(cfg, cfg.probes[0]) == doctest::Approx(1.25 * (10.0 - 2.5)).epsilon(1e-12));
}

TEST_CASE("shape json round trip") {
  Shape u = Shape::unite({Shape::sphere({1, 2, 3}, 0.5), Shape::box({-1, -1, -1}, {0, 0, 0})});
  json j = shape_to_json(u);
  Shape back = shape_from_json(j, "shape");
  CHECK(shape_to_json(back).dump() == j.dump());
}

TEST_CASE("volume files round trip") {
  Grid3 g = Grid3::from_bounds({0, 0, 0}, {1, 0.8, 0.9}, 0.1);
  ScalarField3 f(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::sin(0.1 * i);
  write_volume("test_volume", f, 1.5, "u");
  VolumeData back = read_volume("test_volume");
  std::remove("test_volume.raw");
  std::remove("test_volume.json");
  CHECK(back.time == doctest::Approx(1.5));
  CHECK(back.name == "u");
  REQUIRE(back.field.values.size() == f.values.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    max_err = std::fmax(max_err, std::fabs(back.field.values[i] - f.values[i]));
  CHECK(max_err < 1e-6);  // float32 storage
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  json j = minimal_config();
  j["scene"]["grid"]["h"] = 0.2;
  j["solver"]["T"] = 7.0;
  j["solver"]["sponge"]["thickness"] = 8;
  j["scene"]["grid"]["margin_cells"] = 4;
  j["tau"] = {{"min", 4.0}, {"max", 7.0}, {"count", 4}};
  j["surface_resolution"] = 12;
  RunConfig cfg = RunConfig::from_json(j, "cfg");

  auto run_once = [&](const std::string& csv_path) {
    Scene scene = build_scene(cfg);
    ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, cfg.probes[0]);
    write_indicator_csv(csv_path, art.series);
    std::ifstream f(csv_path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
  };
  std::string a = run_once("det_a.csv");
  std::string b = run_once("det_b.csv");
  std::remove("det_a.csv");
  std::remove("det_b.csv");
  CHECK(a.size() > 0);
  CHECK(a == b);
}

TEST_CASE("volume sidecar is x-fastest little-endian float32") {
  Grid3 g;
  g.origin = {0, 0, 0};
  g.h = 1.0;
  g.nx = 8;
  g.ny = 8;
  g.nz = 8;
  ScalarField3 f(g);
  f.at(1, 0, 0) = 1.0;  // second value in the stream
  write_volume("test_layout", f, 0.0, "u");
  std::ifstream raw("test_layout.raw", std::ios::binary);
  float buf[2];
  raw.read(reinterpret_cast<char*>(buf), sizeof buf);
  raw.close();
  std::remove("test_layout.raw");
  std::remove("test_layout.json");
  CHECK(buf[0] == 0.0f);
  CHECK(buf[1] == 1.0f);
}

}  // TEST_SUITE
