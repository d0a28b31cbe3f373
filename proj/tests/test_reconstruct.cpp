#include <cmath>

#include "doctest.h"
#include "encl/errors.hpp"
#include "encl/reconstruct.hpp"
#include "encl/validate.hpp"

using namespace encl;

namespace {

// Fabricate usable records with exact point distances for a unit-sphere
// obstacle probed from the given centers.
std::vector<ProbeRecord> exact_records(const std::vector<Vec3>& centers,
                                       double eta) {
  Shape d = Shape::sphere({0, 0, 0}, 1.0);
  std::vector<ProbeRecord> out;
  for (const auto& c : centers) {
    ProbeRecord r;
    r.probe = {c, eta, 1.0};
    r.usable = true;
    r.verdict = SignVerdict::Consistent;
    r.point_distance = d_point(d, c);
    r.d_hat = r.point_distance - eta;
    out.push_back(r);
  }
  return out;
}

std::vector<Vec3> axis_centers(double dist) {
  std::vector<Vec3> c;
  for (int a = 0; a < 3; ++a)
    for (int s = -1; s <= 1; s += 2) {
      Vec3 v;
      if (a == 0) v.x = s * dist;
      if (a == 1) v.y = s * dist;
      if (a == 2) v.z = s * dist;
      c.push_back(v);
    }
  return c;
}

std::vector<Vec3> fibonacci_centers(int n, double dist) {
  std::vector<Vec3> c;
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / n;
    double r = std::sqrt(std::fmax(0.0, 1 - z * z));
    c.push_back(Vec3{r * std::cos(ga * i), r * std::sin(ga * i), z} * dist);
  }
  return c;
}

}  // namespace

TEST_SUITE("reconstruct") {

TEST_CASE("no usable probes is an error") {
  Grid3 g = Grid3::from_bounds({-1, -1, -1}, {1, 1, 1}, 0.25);
  std::vector<ProbeRecord> records(3);
  CHECK_THROWS_AS(carve_region(records, g, 0.02), Error);
}

TEST_CASE("bookkeeping: point distance minus estimate is the ball radius") {
  auto records = exact_records(axis_centers(1.9), 0.3);
  for (const auto& r : records)
    CHECK(r.point_distance - r.d_hat == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("exact distances with zero safety leave the obstacle tangent") {
  Grid3 g = Grid3::from_bounds({-1.4, -1.4, -1.4}, {1.4, 1.4, 1.4}, 0.05);
  auto records = exact_records(axis_centers(1.9), 0.3);
  ScalarField3 region = carve_region(records, g, 0.0);
  Shape d = Shape::sphere({0, 0, 0}, 1.0);
  // Nothing inside the obstacle may be excluded.
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (d.sdf(g.center(i, j, k)) < 0.0)
          CHECK(region.values[g.idx(i, j, k)] == 1.0);
  // The exclusion balls come within a cell of the obstacle on each axis.
  double closest = 1e300;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (region.values[g.idx(i, j, k)] == 0.0)
          closest = std::fmin(closest, d.sdf(g.center(i, j, k)));
  CHECK(closest < 2.0 * g.h);
}

TEST_CASE("containment and near-zero errors for exact synthetic records") {
  Grid3 g = Grid3::from_bounds({-1.4, -1.4, -1.4}, {1.4, 1.4, 1.4}, 0.05);
  EnclosureResult res;
  res.records = exact_records(axis_centers(1.9), 0.3);
  res.region = carve_region(res.records, g, 0.02);
  auto metrics = score_against_truth(res, Shape::sphere({0, 0, 0}, 1.0),
                                     Shape::sphere({0, 0, 0}, 1.25));
  CHECK(metrics.containment);
  CHECK(metrics.median_rel_error == doctest::Approx(0.0));
  CHECK(metrics.hausdorff < 0.45);
}

TEST_CASE("denser probe coverage shrinks the Hausdorff distance") {
  Grid3 g = Grid3::from_bounds({-1.4, -1.4, -1.4}, {1.4, 1.4, 1.4}, 0.05);
  Shape d = Shape::sphere({0, 0, 0}, 1.0);
  Shape omega = Shape::sphere({0, 0, 0}, 1.25);
  double h6, h26;
  {
    EnclosureResult res;
    res.records = exact_records(axis_centers(1.9), 0.3);
    res.region = carve_region(res.records, g, 0.0);
    h6 = score_against_truth(res, d, omega).hausdorff;
  }
  {
    EnclosureResult res;
    res.records = exact_records(fibonacci_centers(26, 1.9), 0.3);
    res.region = carve_region(res.records, g, 0.0);
    h26 = score_against_truth(res, d, omega).hausdorff;
  }
  CHECK(h26 <= h6 + 1e-12);
}

TEST_CASE("coarse end-to-end pipeline recovers the probe distance") {
  SuiteOptions opts;
  opts.quick = true;
  RunConfig cfg = canonical_e2e_config(true, 1.0, 8.125, opts);
  Scene scene = build_scene(cfg);
  ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, cfg.probes[0]);
  REQUIRE(art.fit.has_value());
  CHECK(art.verdict == SignVerdict::Consistent);
  CHECK(art.series.consensus == SignConsensus::Positive);
  CHECK(std::fabs(art.fit->d_hat - 4.5) / 4.5 < 0.25);
}

TEST_CASE("an obstacle union is probed at the distance to its nearest part") {
  RunConfig cfg;
  ObstacleSpec ob{Shape::unite({Shape::sphere({1, 0, 0}, 0.5), Shape::sphere({-1, 0, 0}, 0.5)})};
  ob.sound_hard = true;
  cfg.obstacle = ob;
  cfg.surface = Shape::sphere({0, 0, 0}, 2.2);
  cfg.grid.h = 0.1;
  cfg.grid.margin_cells = 8;
  cfg.solver.sponge.thickness = 10;
  cfg.probes = {{{3.6, 0, 0}, 0.3, 1.0}};
  cfg.solver.t_auto = false;
  cfg.solver.T = 3.6;
  cfg.tau = {5.0, 12.0, 8, false};
  cfg.surface_resolution = 20;
  Scene scene = build_scene(cfg);
  ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, cfg.probes[0]);
  REQUIRE(art.fit.has_value());
  // dist to the union is the min over parts: 3.6 - 1 - 0.5 - 0.3.
  CHECK(std::fabs(art.fit->d_hat - 1.8) / 1.8 < 0.2);
  CHECK(art.verdict == SignVerdict::Consistent);
}

TEST_CASE("indicator is stable under surface quadrature refinement") {
  SuiteOptions opts;
  opts.quick = true;
  RunConfig cfg = canonical_e2e_config(true, 1.0, 8.125, opts);
  double values[2];
  int idx = 0;
  for (int resolution : {24, 34}) {
    cfg.surface_resolution = resolution;
    Scene scene = build_scene(cfg);
    ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, cfg.probes[0]);
    values[idx++] = art.series.entries[2].value;  // mid-window tau
  }
  CHECK(std::fabs(values[1] - values[0]) < 0.01 * std::fabs(values[0]));
}

TEST_CASE("probe results are identical alone and in a batch") {
  SuiteOptions opts;
  opts.quick = true;
  RunConfig cfg = canonical_multiprobe_config(opts);
  cfg.probes.resize(2);
  Scene scene = build_scene(cfg);
  EnclosureResult batch = run_plan(cfg, scene);
  ProbeRunArtifacts solo = run_probe_pipeline(cfg, scene, cfg.probes[1]);
  REQUIRE(batch.records.size() == 2);
  REQUIRE(batch.records[1].usable);
  REQUIRE(solo.fit.has_value());
  CHECK(batch.records[1].d_hat == solo.fit->d_hat);  // bitwise
  CHECK(batch.records[1].residual == solo.fit->residual);
}

}  // TEST_SUITE
