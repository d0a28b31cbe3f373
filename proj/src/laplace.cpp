#include "encl/laplace.hpp"

#include <algorithm>
#include <cmath>

#include "encl/errors.hpp"

namespace encl {

TransformAccumulator::TransformAccumulator(std::size_t n_points,
                                           std::vector<double> taus, double dt,
                                           int n_intervals)
    : n_points_(n_points), taus_(std::move(taus)), dt_(dt),
      n_intervals_(n_intervals) {
  if (dt_ <= 0.0) fail(Errc::config_error, "transform step must be positive");
  if (n_intervals_ < 1) fail(Errc::config_error, "transform needs at least one interval");
  if (taus_.empty()) fail(Errc::config_error, "tau list must not be empty");
  for (std::size_t i = 1; i < taus_.size(); ++i)
    if (taus_[i] <= taus_[i - 1])
      fail(Errc::config_error, "tau list must be strictly increasing");
  if (taus_.front() <= 0.0) fail(Errc::config_error, "tau values must be positive");
  sums_.assign(taus_.size() * n_points_, 0.0);
}

void TransformAccumulator::accumulate(int level, double t,
                                      std::span<const double> values) {
  if (level != next_level_)
    fail(Errc::non_monotone_time,
         "expected level " + std::to_string(next_level_) + ", got " + std::to_string(level));
  if (values.size() != n_points_)
    fail(Errc::config_error, "sample count does not match the accumulator");
  (void)t;
  // Trapezoid: half weights at both endpoints.
  const double w = (level == 0 || level == n_intervals_) ? 0.5 * dt_ : dt_;
  const double tn = level * dt_;
  for (std::size_t ti = 0; ti < taus_.size(); ++ti) {
    const double factor = w * std::exp(-taus_[ti] * tn);
    double* dst = sums_.data() + ti * n_points_;
    for (std::size_t p = 0; p < n_points_; ++p) dst[p] += factor * values[p];
  }
  ++next_level_;
}

const std::vector<double>& TransformAccumulator::finalize() const {
  if (!complete())
    fail(Errc::incomplete_run,
         "transform finalized after " + std::to_string(next_level_) + " of " +
             std::to_string(n_intervals_ + 1) + " levels");
  return sums_;
}

std::size_t SurfaceTransform::tau_index(double tau) const {
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (std::fabs(taus[i] - tau) <= 1e-12 * std::fmax(1.0, std::fabs(tau))) return i;
  fail(Errc::missing_tau, "tau " + std::to_string(tau) + " not in the transform");
}

SurfaceTransform SurfaceTransform::operator-(const SurfaceTransform& o) const {
  if (n_nodes != o.n_nodes || taus.size() != o.taus.size())
    fail(Errc::config_error, "transform shapes do not match");
  SurfaceTransform r = *this;
  for (std::size_t i = 0; i < w_on.size(); ++i) {
    r.w_on[i] -= o.w_on[i];
    r.w_inner[i] -= o.w_inner[i];
    r.w_outer[i] -= o.w_outer[i];
    r.dwdn[i] -= o.dwdn[i];
  }
  return r;
}

void TraceBuffer::subtract(const TraceBuffer& o) {
  if (n_points != o.n_points || n_intervals != o.n_intervals || dt != o.dt)
    fail(Errc::config_error, "trace buffers do not match");
  for (std::size_t i = 0; i < series.size(); ++i) series[i] -= o.series[i];
}

SurfaceRecorder::SurfaceRecorder(const SurfacePatchSet& patches,
                                 std::vector<double> taus, double dt,
                                 int n_intervals, bool keep_traces)
    : patches_(&patches),
      acc_(patches.nodes.size() * 3, std::move(taus), dt, n_intervals),
      keep_traces_(keep_traces) {
  traces_.n_points = patches.nodes.size() * 3;
  traces_.dt = dt;
  traces_.n_intervals = n_intervals;
  if (keep_traces_) traces_.series.reserve(traces_.n_points * (n_intervals + 1));
}

std::vector<Vec3> SurfaceRecorder::tap_points() const {
  std::vector<Vec3> pts;
  pts.reserve(patches_->nodes.size() * 3);
  for (const auto& n : patches_->nodes) {
    pts.push_back(n.position);
    pts.push_back(n.inner_offset);
    pts.push_back(n.outer_offset);
  }
  return pts;
}

void SurfaceRecorder::ingest(int level, double t, std::span<const double> values) {
  acc_.accumulate(level, t, values);
  if (keep_traces_) traces_.series.insert(traces_.series.end(), values.begin(), values.end());
}

namespace {

SurfaceTransform assemble(const std::vector<double>& sums,
                          const SurfacePatchSet& patches,
                          const std::vector<double>& taus) {
  SurfaceTransform st;
  st.taus = taus;
  st.n_nodes = patches.nodes.size();
  const std::size_t nn = st.n_nodes;
  st.w_on.resize(taus.size() * nn);
  st.w_inner.resize(taus.size() * nn);
  st.w_outer.resize(taus.size() * nn);
  st.dwdn.resize(taus.size() * nn);
  const double inv_2d = 1.0 / (2.0 * patches.offset_delta);
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const double* src = sums.data() + ti * (nn * 3);
    for (std::size_t n = 0; n < nn; ++n) {
      double on = src[3 * n], in = src[3 * n + 1], out = src[3 * n + 2];
      st.w_on[ti * nn + n] = on;
      st.w_inner[ti * nn + n] = in;
      st.w_outer[ti * nn + n] = out;
      st.dwdn[ti * nn + n] = (out - in) * inv_2d;
    }
  }
  return st;
}

}  // namespace

SurfaceTransform SurfaceRecorder::transform() const {
  return assemble(acc_.finalize(), *patches_, acc_.taus());
}

SurfaceTransform SurfaceRecorder::transform_traces(const TraceBuffer& traces,
                                                   const SurfacePatchSet& patches,
                                                   const std::vector<double>& taus) {
  if (traces.n_points != patches.nodes.size() * 3)
    fail(Errc::config_error, "trace layout does not match the patch set");
  TransformAccumulator acc(traces.n_points, taus, traces.dt, traces.n_intervals);
  for (int n = 0; n <= traces.n_intervals; ++n)
    acc.accumulate(n, n * traces.dt, traces.level(n));
  return assemble(acc.finalize(), patches, taus);
}

}  // namespace encl
