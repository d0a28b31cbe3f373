#include "encl/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "encl/errors.hpp"

namespace encl {

ProbeRunArtifacts run_probe_pipeline(const RunConfig& cfg, const Scene& scene,
                                     const ProbeBall& probe, bool keep_traces) {
  if (scene.patches.nodes.empty())
    fail(Errc::config_error, "indicator pipeline needs a recording surface");

  ProbeRunArtifacts art;
  const std::vector<double> taus = cfg.tau.values();
  const bool reference = cfg.mode == IndicatorMode::Reference;

  SolverConfig sc = make_solver_config(cfg, scene, probe, /*with_obstacle=*/true);
  art.T = sc.T;
  WaveSolver solver(sc, probe);
  SurfaceRecorder rec(scene.patches, taus, solver.dt(), solver.total_levels(),
                      reference || keep_traces);
  RunHooks hooks;
  hooks.taps.push_back({rec.tap_points(), [&](int level, double t, std::span<const double> v) {
                          rec.ingest(level, t, v);
                        }});
  art.report = solver.run(hooks);

  FloorPolicy floor;
  floor.factor = cfg.floor_factor;
  floor.max_abs_u_final = art.report.max_abs_u_final;
  floor.T = art.T;
  floor.area = scene.surface_area;

  if (reference) {
    SolverConfig sc_free = make_solver_config(cfg, scene, probe, /*with_obstacle=*/false);
    sc_free.force_dt = solver.dt();  // both runs must share the time axis
    WaveSolver free_solver(sc_free, probe);
    SurfaceRecorder rec_free(scene.patches, taus, free_solver.dt(),
                             free_solver.total_levels(), true);
    RunHooks free_hooks;
    free_hooks.taps.push_back(
        {rec_free.tap_points(), [&](int level, double t, std::span<const double> v) {
           rec_free.ingest(level, t, v);
         }});
    art.report_reference = free_solver.run(free_hooks);
    // Difference the raw series before transforming: where no scattered
    // signal has arrived the two series agree bitwise and cancel exactly.
    TraceBuffer scattered = rec.traces();
    scattered.subtract(rec_free.traces());
    art.transform = SurfaceRecorder::transform_traces(scattered, scene.patches, taus);
    // The obstacle-free functional is the measured noise level.
    SurfaceTransform free_transform = rec_free.transform();
    floor.taus = taus;
    for (double tau : taus)
      floor.reference_values.push_back(
          compute_indicator(scene.patches, free_transform, probe, tau));
    art.reference_indicator = floor.reference_values;
  } else {
    art.transform = rec.transform();
  }
  if (keep_traces) art.traces = rec.traces();
  art.series = build_series(scene.patches, art.transform, probe, floor);
  ObstacleKind kind = cfg.obstacle ? cfg.obstacle->kind() : ObstacleKind::SoundHard;
  art.verdict = classify_sign(art.series, kind);
  try {
    art.fit = extract_distance(art.series);
  } catch (const Error& e) {
    art.fit_error = e.what();
  }
  return art;
}

EnclosureResult run_plan(const RunConfig& cfg, const Scene& scene) {
  if (cfg.probes.empty()) fail(Errc::config_error, "plan needs at least one probe");
  EnclosureResult result;
  for (const auto& probe : cfg.probes) {
    ProbeRecord rec;
    rec.probe = probe;
    try {
      ProbeRunArtifacts art = run_probe_pipeline(cfg, scene, probe);
      rec.T = art.T;
      rec.verdict = art.verdict;
      if (art.fit && art.verdict == SignVerdict::Consistent) {
        rec.usable = true;
        rec.d_hat = art.fit->d_hat;
        rec.point_distance = art.fit->d_hat + probe.radius;
        rec.residual = art.fit->residual;
      } else {
        rec.note = art.fit ? "sign verdict not consistent" : art.fit_error;
      }
    } catch (const Error& e) {
      rec.note = e.what();
    }
    result.records.push_back(std::move(rec));
  }
  result.region = carve_region(result.records, scene.grid, cfg.safety);
  if (cfg.obstacle && cfg.surface)
    result.metrics = score_against_truth(result, cfg.obstacle->shape, *cfg.surface);
  return result;
}

ScalarField3 carve_region(const std::vector<ProbeRecord>& records,
                          const Grid3& grid, double safety) {
  std::vector<const ProbeRecord*> usable;
  for (const auto& r : records)
    if (r.usable) usable.push_back(&r);
  if (usable.empty()) fail(Errc::no_usable_probes, "no probe produced a usable distance");

  ScalarField3 region(grid, 1.0);
  for (const auto* r : usable) {
    const double rr = r->point_distance * (1.0 - safety);
    const double rr2 = rr * rr;
    for (int k = 0; k < grid.nz; ++k)
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
          if ((grid.center(i, j, k) - r->probe.center).norm2() < rr2)
            region.values[grid.idx(i, j, k)] = 0.0;
        }
  }
  return region;
}

ReconstructionMetrics score_against_truth(const EnclosureResult& result,
                                          const Shape& obstacle,
                                          const Shape& surface) {
  ReconstructionMetrics m;
  for (const auto& r : result.records) {
    if (!r.usable) continue;
    double truth = d_point(obstacle, r.probe.center);
    m.true_distances.push_back(truth);
    double err = std::fabs(r.point_distance - truth);
    m.abs_errors.push_back(err);
    m.rel_errors.push_back(truth > 0 ? err / truth : err);
  }
  if (!m.rel_errors.empty()) {
    std::vector<double> sorted = m.rel_errors;
    std::sort(sorted.begin(), sorted.end());
    m.median_rel_error = sorted[sorted.size() / 2];
    m.max_rel_error = sorted.back();
  }

  const Grid3& g = result.region.grid;
  const auto& mask = result.region.values;
  auto inside_surface = [&](int i, int j, int k) {
    return surface.sdf(g.center(i, j, k)) < 0.0;
  };
  auto possible = [&](int i, int j, int k) { return mask[g.idx(i, j, k)] > 0.5; };

  // Boundary of the possible set within the surface: a possible cell with an
  // excluded neighbor, or clipped by the surface or grid edge.
  std::vector<Vec3> boundary;
  bool containment = true;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!inside_surface(i, j, k)) continue;
        Vec3 c = g.center(i, j, k);
        bool poss = possible(i, j, k);
        if (!poss) {
          if (obstacle.sdf(c) < 0.0) containment = false;
          continue;
        }
        bool edge = false;
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        for (int n = 0; n < 6 && !edge; ++n) {
          int ii = i + di[n], jj = j + dj[n], kk = k + dk[n];
          if (ii < 0 || jj < 0 || kk < 0 || ii >= g.nx || jj >= g.ny || kk >= g.nz)
            edge = true;
          else if (!inside_surface(ii, jj, kk))
            edge = true;
          else if (!possible(ii, jj, kk))
            edge = true;
        }
        if (edge) boundary.push_back(c);
      }
  m.containment = containment;

  if (!boundary.empty()) {
    double sup_b = 0.0;
    for (const auto& c : boundary) sup_b = std::fmax(sup_b, obstacle.boundary_distance(c));
    double sup_d = 0.0;
    for (const auto& q : obstacle.boundary_samples(4096)) {
      double best = 1e300;
      for (const auto& c : boundary) best = std::fmin(best, (c - q).norm2());
      sup_d = std::fmax(sup_d, std::sqrt(best));
    }
    m.hausdorff = std::fmax(sup_b, sup_d);
  } else {
    m.hausdorff = std::numeric_limits<double>::infinity();
  }
  return m;
}

}  // namespace encl
