// Command-line front end: forward solves, indicator runs, multi-probe
// reconstruction and the validation suites, driven by JSON config files.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"

#include "encl/config.hpp"
#include "encl/errors.hpp"
#include "encl/io.hpp"
#include "encl/reconstruct.hpp"
#include "encl/validate.hpp"

namespace {

using namespace encl;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::config_error:
    case Errc::underresolved_obstacle:
    case Errc::non_positive_contrast:
    case Errc::unsupported_surface_shape:
    case Errc::probe_outside_grid:
    case Errc::probe_intersects_surface:
    case Errc::unknown_suite:
    case Errc::io_error:
      return kExitConfig;
    default:
      return kExitNumerical;
  }
}

std::string resolve_output_dir(const RunConfig& cfg, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (const char* env = std::getenv("ENCLOSURE_OUT")) return env;
  return cfg.output.dir;
}

RunConfig load_config(const std::string& path, const std::string& out_dir,
                      int threads) {
  RunConfig cfg = RunConfig::from_file(path);
  if (threads > 0) cfg.solver.threads = threads;
  std::string dir = resolve_output_dir(cfg, out_dir);
  cfg.output.dir = dir;
  ensure_dir(dir);
  write_json(dir + "/resolved_config.json", cfg.to_json());
  return cfg;
}

int cmd_forward(const std::string& config_path, const std::string& out_dir,
                int threads) {
  RunConfig cfg = load_config(config_path, out_dir, threads);
  if (cfg.probes.empty()) fail(Errc::config_error, "forward needs a probe");
  Scene scene = build_scene(cfg);
  const ProbeBall& probe = cfg.probes.front();
  SolverConfig sc = make_solver_config(cfg, scene, probe, true);
  WaveSolver solver(sc, probe);

  std::optional<SurfaceRecorder> recorder;
  RunHooks hooks;
  if (!scene.patches.nodes.empty()) {
    recorder.emplace(scene.patches, cfg.tau.values(), solver.dt(),
                     solver.total_levels(), cfg.output.write_traces);
    hooks.taps.push_back(
        {recorder->tap_points(), [&](int level, double t, std::span<const double> v) {
           recorder->ingest(level, t, v);
         }});
  }

  // Named record points: kept as raw series for oracle comparisons.
  std::vector<std::vector<double>> point_series(cfg.record_points.size());
  std::vector<double> times;
  if (!cfg.record_points.empty())
    hooks.taps.push_back(
        {cfg.record_points, [&](int, double t, std::span<const double> v) {
           times.push_back(t);
           for (std::size_t i = 0; i < v.size(); ++i) point_series[i].push_back(v[i]);
         }});

  if (cfg.output.snapshot_every > 0) {
    hooks.snapshot_every = cfg.output.snapshot_every;
    hooks.on_snapshot = [&](int level, double t, const ScalarField3& f) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%06d", level);
      write_volume(cfg.output.dir + "/" + name, f, t, "u");
    };
  }

  RunReport rep = solver.run(hooks);
  json out = {{"report", report_to_json(rep)}};

  if (cfg.oracle_check && !cfg.record_points.empty()) {
    if (cfg.obstacle)
      fail(Errc::config_error, "oracle check applies to free-space runs only");
    double num = 0.0, den = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < cfg.record_points.size(); ++i)
      for (std::size_t n = 0; n < times.size(); ++n) {
        double ref = free_space_oracle(cfg.record_points[i], times[n], probe);
        double d = point_series[i][n] - ref;
        num += d * d;
        den += ref * ref;
        max_abs = std::fmax(max_abs, std::fabs(d));
      }
    double rel = std::sqrt(num / std::fmax(den, 1e-300));
    std::printf("oracle check: relative L2(time) error %.3e, max abs error %.3e\n",
                rel, max_abs);
    out["oracle_check"] = {{"rel_l2", rel}, {"max_abs", max_abs}};
  }

  if (!cfg.record_points.empty()) {
    std::FILE* f = std::fopen((cfg.output.dir + "/points.csv").c_str(), "w");
    if (!f) fail(Errc::io_error, "cannot write points.csv");
    std::fprintf(f, "level,t");
    for (std::size_t i = 0; i < cfg.record_points.size(); ++i)
      std::fprintf(f, ",p%zu", i);
    std::fprintf(f, "\n");
    for (std::size_t n = 0; n < times.size(); ++n) {
      std::fprintf(f, "%zu,%.17g", n, times[n]);
      for (auto& s : point_series) std::fprintf(f, ",%.17g", s[n]);
      std::fprintf(f, "\n");
    }
    std::fclose(f);
  }

  if (recorder) {
    if (cfg.output.write_traces)
      write_traces_csv(cfg.output.dir + "/traces.csv", recorder->traces(),
                       scene.patches, cfg.output.trace_decimate);
    write_transform_csv(cfg.output.dir + "/transform.csv", recorder->transform(),
                        scene.patches);
  }
  write_json(cfg.output.dir + "/run_report.json", out);
  std::printf("forward run complete: %d steps, %.2fs, max|u|=%.3e\n", rep.steps,
              rep.wall_seconds, rep.max_abs_u);
  return 0;
}

int cmd_indicator(const std::string& config_path, const std::string& out_dir,
                  int threads) {
  RunConfig cfg = load_config(config_path, out_dir, threads);
  if (cfg.probes.empty()) fail(Errc::config_error, "indicator needs a probe");
  if (!cfg.surface) fail(Errc::config_error, "indicator needs scene.surface");
  Scene scene = build_scene(cfg);
  ProbeRunArtifacts art =
      run_probe_pipeline(cfg, scene, cfg.probes.front(), cfg.output.write_traces);

  write_indicator_csv(cfg.output.dir + "/indicator.csv", art.series);
  write_transform_csv(cfg.output.dir + "/transform.csv", art.transform, scene.patches);
  if (art.traces)
    write_traces_csv(cfg.output.dir + "/traces.csv", *art.traces, scene.patches,
                     cfg.output.trace_decimate);

  json out = {{"T", art.T},
              {"verdict", to_string(art.verdict)},
              {"series", series_to_json(art.series)},
              {"report", report_to_json(art.report)}};
  if (art.report_reference)
    out["report_reference"] = report_to_json(*art.report_reference);
  if (!art.reference_indicator.empty())
    out["reference_indicator"] = art.reference_indicator;
  if (!art.fit_error.empty()) out["fit_error"] = art.fit_error;
  write_json(cfg.output.dir + "/indicator.json", out);

  for (const auto& e : art.series.entries)
    std::printf("tau=%6.3f  I=% .6e  %s  naive_d=%s\n", e.tau, e.value,
                e.above_floor ? "usable" : "floor ",
                e.above_floor ? std::to_string(e.naive_d).c_str() : "-");
  if (art.fit)
    std::printf("fit: d_hat=%.6g (q=%.3g, residual=%.3g, window [%g, %g])\n",
                art.fit->d_hat, art.fit->q_hat, art.fit->residual, art.fit->tau_lo,
                art.fit->tau_hi);
  else
    std::printf("fit unavailable: %s\n", art.fit_error.c_str());
  std::printf("sign verdict: %s\n", to_string(art.verdict));
  return 0;
}

int cmd_reconstruct(const std::string& config_path, const std::string& out_dir,
                    int threads) {
  RunConfig cfg = load_config(config_path, out_dir, threads);
  if (!cfg.surface) fail(Errc::config_error, "reconstruct needs scene.surface");
  Scene scene = build_scene(cfg);
  EnclosureResult res = run_plan(cfg, scene);

  std::FILE* f = std::fopen((cfg.output.dir + "/probes.csv").c_str(), "w");
  if (!f) fail(Errc::io_error, "cannot write probes.csv");
  std::fprintf(f, "probe,px,py,pz,eta,T,usable,verdict,d_hat,point_distance,residual\n");
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s,%.17g,%.17g,%.17g\n", i,
                 r.probe.center.x, r.probe.center.y, r.probe.center.z, r.probe.radius,
                 r.T, r.usable ? 1 : 0, to_string(r.verdict), r.d_hat,
                 r.point_distance, r.residual);
  }
  std::fclose(f);

  write_volume(cfg.output.dir + "/region", res.region, 0.0, "region");
  json out;
  json records = json::array();
  for (const auto& r : res.records)
    records.push_back({{"center", {r.probe.center.x, r.probe.center.y, r.probe.center.z}},
                       {"radius", r.probe.radius},
                       {"T", r.T},
                       {"usable", r.usable},
                       {"verdict", to_string(r.verdict)},
                       {"d_hat", r.d_hat},
                       {"point_distance", r.point_distance},
                       {"residual", r.residual},
                       {"note", r.note}});
  out["records"] = records;
  if (res.metrics) {
    out["metrics"] = {{"median_rel_error", res.metrics->median_rel_error},
                      {"max_rel_error", res.metrics->max_rel_error},
                      {"hausdorff", res.metrics->hausdorff},
                      {"containment", res.metrics->containment}};
    std::printf("metrics: median rel err %.3g, max rel err %.3g, Hausdorff %.3g, %s\n",
                res.metrics->median_rel_error, res.metrics->max_rel_error,
                res.metrics->hausdorff,
                res.metrics->containment ? "obstacle contained" : "CONTAINMENT VIOLATED");
  }
  write_json(cfg.output.dir + "/reconstruction.json", out);
  int usable = 0;
  for (const auto& r : res.records) usable += r.usable ? 1 : 0;
  std::printf("reconstruction complete: %d/%zu probes usable\n", usable,
              res.records.size());
  return 0;
}

int cmd_validate(const std::string& suite, const std::string& out_dir, int threads,
                 bool quick, std::uint64_t seed) {
  SuiteOptions opts;
  opts.threads = threads > 0 ? threads : 1;
  opts.quick = quick;
  opts.seed = seed;
  std::vector<std::string> names;
  if (suite == "all") names = suite_names();
  else names.push_back(suite);

  json report = json::array();
  bool all_pass = true;
  for (const auto& name : names) {
    SuiteResult r = run_suite(name, opts);
    print_suite(r);
    report.push_back(suite_to_json(r));
    all_pass = all_pass && r.pass;
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_json(out_dir + "/validation.json", report);
  }
  return all_pass ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic scattering simulation and probe-based distance "
               "reconstruction from finite-time boundary data"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all";
  int threads = 0;
  bool quick = false;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("-c,--config", config_path, "JSON run configuration")->required();
    sub->add_option("-o,--output", out_dir, "output directory override");
    sub->add_option("-t,--threads", threads, "worker thread cap");
  };

  CLI::App* fwd = app.add_subcommand("forward", "run one forward solve");
  add_common(fwd, true);
  CLI::App* ind = app.add_subcommand("indicator", "forward + transform + indicator");
  add_common(ind, true);
  CLI::App* rec = app.add_subcommand("reconstruct", "multi-probe region carving");
  add_common(rec, true);
  CLI::App* val = app.add_subcommand("validate", "run validation suites");
  add_common(val, false);
  val->add_option("-s,--suite", suite, "suite name or 'all'");
  val->add_flag("--quick", quick, "shrink long-running suites");
  val->add_option("--seed", seed, "seed for randomized suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fwd->parsed()) return cmd_forward(config_path, out_dir, threads);
    if (ind->parsed()) return cmd_indicator(config_path, out_dir, threads);
    if (rec->parsed()) return cmd_reconstruct(config_path, out_dir, threads);
    if (val->parsed()) return cmd_validate(suite, out_dir, threads, quick, seed);
  } catch (const encl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
