#ifndef ENCL_LAPLACE_HPP
#define ENCL_LAPLACE_HPP

#include <span>
#include <vector>

#include "encl/surface.hpp"

namespace encl {

/// Streaming trapezoidal transform sum_t e^{-tau t} u(t) dt over a batch of
/// tau values for a set of sample points, fed one time level at a time.
class TransformAccumulator {
 public:
  TransformAccumulator(std::size_t n_points, std::vector<double> taus,
                       double dt, int n_intervals);

  /// Add one time level. Levels must arrive in order 0,1,...,n_intervals.
  void accumulate(int level, double t, std::span<const double> values);

  /// Transform values, laid out per tau then per point. Throws
  /// incomplete_run until the final level has been accumulated.
  const std::vector<double>& finalize() const;

  std::size_t n_points() const { return n_points_; }
  const std::vector<double>& taus() const { return taus_; }
  bool complete() const { return next_level_ > n_intervals_; }

 private:
  std::size_t n_points_;
  std::vector<double> taus_;
  double dt_;
  int n_intervals_;
  int next_level_ = 0;
  std::vector<double> sums_;  // [tau][point]
};

/// Transforms of the surface recording: w on the nodes and at the paired
/// normal offsets, plus the centered normal derivative.
struct SurfaceTransform {
  std::vector<double> taus;
  std::size_t n_nodes = 0;
  // Layout: [tau][node]
  std::vector<double> w_on, w_inner, w_outer, dwdn;

  double at_on(std::size_t tau_i, std::size_t node) const {
    return w_on[tau_i * n_nodes + node];
  }
  double at_dwdn(std::size_t tau_i, std::size_t node) const {
    return dwdn[tau_i * n_nodes + node];
  }
  std::size_t tau_index(double tau) const;  // throws missing_tau

  /// Linear difference, used to subtract a reference recording.
  SurfaceTransform operator-(const SurfaceTransform& o) const;
};

/// Raw time series at the surface sample points (on/inner/outer per node),
/// retained so recordings can be differenced before transforming.
struct TraceBuffer {
  std::size_t n_points = 0;
  double dt = 0.0;
  int n_intervals = 0;
  std::vector<double> series;  // [level][point]

  void subtract(const TraceBuffer& o);  // throws config_error on mismatch
  std::span<const double> level(int n) const {
    return {series.data() + (std::size_t)n * n_points, n_points};
  }
};

/// Couples a patch set to the solver tap interface: streams into the
/// accumulator and (optionally) a trace buffer. Sample order per level is
/// [node 0 on, node 0 inner, node 0 outer, node 1 on, ...].
class SurfaceRecorder {
 public:
  SurfaceRecorder(const SurfacePatchSet& patches, std::vector<double> taus,
                  double dt, int n_intervals, bool keep_traces);

  std::vector<Vec3> tap_points() const;
  void ingest(int level, double t, std::span<const double> values);
  SurfaceTransform transform() const;
  const TraceBuffer& traces() const { return traces_; }

  /// Transform a (possibly differenced) trace buffer with the same layout.
  static SurfaceTransform transform_traces(const TraceBuffer& traces,
                                           const SurfacePatchSet& patches,
                                           const std::vector<double>& taus);

 private:
  const SurfacePatchSet* patches_;
  TransformAccumulator acc_;
  TraceBuffer traces_;
  bool keep_traces_;
};

}  // namespace encl

#endif
