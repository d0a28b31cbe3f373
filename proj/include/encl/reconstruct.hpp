#ifndef ENCL_RECONSTRUCT_HPP
#define ENCL_RECONSTRUCT_HPP

#include <optional>
#include <string>
#include <vector>

#include "encl/config.hpp"
#include "encl/indicator.hpp"
#include "encl/laplace.hpp"
#include "encl/wave.hpp"

namespace encl {

/// Everything one probe produces: the forward run(s), the transform that was
/// fed to the indicator, and the fitted distance.
struct ProbeRunArtifacts {
  double T = 0.0;
  RunReport report;              // run with the obstacle (the measurement)
  std::optional<RunReport> report_reference;
  SurfaceTransform transform;    // transform used by the indicator
  std::optional<TraceBuffer> traces;  // measurement traces, when kept
  std::vector<double> reference_indicator;  // obstacle-free functional per tau
  IndicatorSeries series;
  SignVerdict verdict = SignVerdict::Indeterminate;
  std::optional<IndicatorFit> fit;
  std::string fit_error;
};

/// Forward solve + streaming transform + indicator for one probe. In
/// reference mode a second obstacle-free run on the same grid is subtracted
/// from the recorded series before transforming, which removes the direct
/// field (theory bounds its contribution below the signal whenever the time
/// condition holds) together with its shared discretization error.
ProbeRunArtifacts run_probe_pipeline(const RunConfig& cfg, const Scene& scene,
                                     const ProbeBall& probe,
                                     bool keep_traces = false);

struct ProbeRecord {
  ProbeBall probe;
  double T = 0.0;
  bool usable = false;
  SignVerdict verdict = SignVerdict::Indeterminate;
  double d_hat = 0.0;           // estimated dist(obstacle, probe ball)
  double point_distance = 0.0;  // d_hat + probe radius: distance from center
  double residual = 0.0;
  std::string note;
};

struct ReconstructionMetrics {
  std::vector<double> true_distances;  // per usable record, from the center
  std::vector<double> abs_errors;
  std::vector<double> rel_errors;
  double median_rel_error = 0.0;
  double max_rel_error = 0.0;
  double hausdorff = 0.0;
  bool containment = false;
};

struct EnclosureResult {
  std::vector<ProbeRecord> records;
  ScalarField3 region;  // 1 = possible, 0 = excluded
  std::optional<ReconstructionMetrics> metrics;
};

/// One forward solve per probe, then carve the region and score it against
/// the configured obstacle when present.
EnclosureResult run_plan(const RunConfig& cfg, const Scene& scene);

/// Cell excluded when it lies deeper than point_distance*(1-safety) inside
/// some usable probe's ball of confidence. Throws no_usable_probes.
ScalarField3 carve_region(const std::vector<ProbeRecord>& records,
                          const Grid3& grid, double safety);

/// Per-probe distance errors plus the symmetric Hausdorff distance between
/// the carved boundary (within the surface) and the obstacle boundary.
ReconstructionMetrics score_against_truth(const EnclosureResult& result,
                                          const Shape& obstacle,
                                          const Shape& surface);

}  // namespace encl

#endif
