#include <cmath>
#include <vector>

#include "doctest.h"
#include "encl/errors.hpp"
#include "encl/laplace.hpp"

using namespace encl;

namespace {

// Feed a scalar signal g(t) into a one-point accumulator and return the
// transforms for the given taus.
std::vector<double> transform_signal(double (*g)(double), double T, int n,
                                     const std::vector<double>& taus) {
  TransformAccumulator acc(1, taus, T / n, n);
  for (int level = 0; level <= n; ++level) {
    double t = level * (T / n);
    double v = g(t);
    acc.accumulate(level, t, std::span<const double>(&v, 1));
  }
  std::vector<double> out;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) out.push_back(acc.finalize()[ti]);
  return out;
}

double decaying(double t) { return std::exp(-0.7 * t); }
double zero_signal(double) { return 0.0; }

SurfacePatchSet tiny_patchset(double delta) {
  SurfacePatchSet set;
  set.offset_delta = delta;
  Vec3 n1{1, 0, 0}, n2{0, 1, 0};
  set.nodes.push_back({{1, 0, 0}, n1, 0.5, {1 - delta, 0, 0}, {1 + delta, 0, 0}});
  set.nodes.push_back({{0, 1, 0}, n2, 0.5, {0, 1 - delta, 0}, {0, 1 + delta, 0}});
  return set;
}

}  // namespace

TEST_SUITE("laplace") {

TEST_CASE("zero signal transforms to zero") {
  auto w = transform_signal(zero_signal, 2.0, 64, {1.0, 4.0});
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
}

TEST_CASE("exponential signal matches the analytic integral at second order") {
  const double T = 3.0, a = 0.7;
  std::vector<double> taus{1.0, 3.0, 8.0};
  double errs[2];
  int idx = 0;
  for (int n : {200, 400}) {
    auto w = transform_signal(decaying, T, n, taus);
    double max_rel = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      double exact = (1.0 - std::exp(-(taus[i] + a) * T)) / (taus[i] + a);
      max_rel = std::fmax(max_rel, std::fabs(w[i] - exact) / exact);
    }
    errs[idx++] = max_rel;
  }
  double order = std::log2(errs[0] / errs[1]);
  // Relative trapezoid error ~ (dt^2/12)(tau+a)^2: 3.5e-4 at tau=8, n=400.
  CHECK(errs[1] < 5e-4);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("accumulation is linear in the signal") {
  const double T = 1.5;
  const int n = 100;
  std::vector<double> taus{2.0, 5.0};
  TransformAccumulator a(1, taus, T / n, n), b(1, taus, T / n, n), ab(1, taus, T / n, n);
  for (int level = 0; level <= n; ++level) {
    double t = level * (T / n);
    double va = std::sin(3 * t), vb = std::cos(2 * t) - 0.3;
    double vsum = va + vb;
    a.accumulate(level, t, std::span<const double>(&va, 1));
    b.accumulate(level, t, std::span<const double>(&vb, 1));
    ab.accumulate(level, t, std::span<const double>(&vsum, 1));
  }
  for (std::size_t i = 0; i < taus.size(); ++i)
    CHECK(ab.finalize()[i] ==
          doctest::Approx(a.finalize()[i] + b.finalize()[i]).epsilon(1e-12));
}

TEST_CASE("one-signed signals transform monotonically in tau") {
  auto w = transform_signal(decaying, 2.5, 250, {1.0, 2.0, 4.0, 8.0});
  for (std::size_t i = 1; i < w.size(); ++i) {
    CHECK(w[i] > 0.0);
    CHECK(w[i] < w[i - 1]);
  }
}

TEST_CASE("levels must arrive in order and finalize needs the full run") {
  TransformAccumulator acc(1, {1.0}, 0.1, 10);
  double v = 1.0;
  acc.accumulate(0, 0.0, std::span<const double>(&v, 1));
  CHECK_THROWS_AS(acc.accumulate(2, 0.2, std::span<const double>(&v, 1)), Error);
  CHECK_THROWS_AS(acc.finalize(), Error);
}

TEST_CASE("spatially constant recordings have zero normal derivative") {
  SurfacePatchSet patches = tiny_patchset(0.05);
  std::vector<double> taus{2.0, 6.0};
  const double T = 1.0;
  const int n = 50;
  SurfaceRecorder rec(patches, taus, T / n, n, false);
  std::vector<double> vals(patches.nodes.size() * 3);
  for (int level = 0; level <= n; ++level) {
    double g = std::exp(-1.3 * level * (T / n));
    std::fill(vals.begin(), vals.end(), g);
    rec.ingest(level, level * (T / n), vals);
  }
  SurfaceTransform st = rec.transform();
  for (std::size_t ti = 0; ti < taus.size(); ++ti)
    for (std::size_t node = 0; node < st.n_nodes; ++node)
      CHECK(st.at_dwdn(ti, node) == doctest::Approx(0.0));
}

TEST_CASE("linear-in-normal recordings recover the transformed slope") {
  const double delta = 0.05;
  SurfacePatchSet patches = tiny_patchset(delta);
  std::vector<double> taus{3.0};
  const double T = 2.0;
  const int n = 400;
  SurfaceRecorder rec(patches, taus, T / n, n, false);
  std::vector<double> vals(patches.nodes.size() * 3);
  for (int level = 0; level <= n; ++level) {
    double t = level * (T / n);
    double g = std::exp(-0.9 * t);
    for (std::size_t node = 0; node < patches.nodes.size(); ++node) {
      const auto& nd = patches.nodes[node];
      // u(x, t) = (n . x) g(t) sampled at the node and both offsets.
      vals[3 * node] = nd.normal.dot(nd.position) * g;
      vals[3 * node + 1] = nd.normal.dot(nd.inner_offset) * g;
      vals[3 * node + 2] = nd.normal.dot(nd.outer_offset) * g;
    }
    rec.ingest(level, t, vals);
  }
  SurfaceTransform st = rec.transform();
  double ghat = (1.0 - std::exp(-(3.0 + 0.9) * T)) / (3.0 + 0.9);
  for (std::size_t node = 0; node < st.n_nodes; ++node)
    CHECK(st.at_dwdn(0, node) == doctest::Approx(ghat).epsilon(1e-4));
}

TEST_CASE("transform of a difference equals the difference of transforms") {
  SurfacePatchSet patches = tiny_patchset(0.05);
  std::vector<double> taus{2.0, 7.0};
  const double T = 1.0;
  const int n = 80;
  SurfaceRecorder ra(patches, taus, T / n, n, true);
  SurfaceRecorder rb(patches, taus, T / n, n, true);
  std::vector<double> va(patches.nodes.size() * 3), vb(va.size());
  for (int level = 0; level <= n; ++level) {
    double t = level * (T / n);
    for (std::size_t i = 0; i < va.size(); ++i) {
      va[i] = std::sin(2 * t + 0.1 * i);
      vb[i] = std::cos(t) * (0.2 + 0.01 * i);
    }
    ra.ingest(level, t, va);
    rb.ingest(level, t, vb);
  }
  TraceBuffer diff = ra.traces();
  diff.subtract(rb.traces());
  SurfaceTransform st_diff = SurfaceRecorder::transform_traces(diff, patches, taus);
  SurfaceTransform st_sub = ra.transform() - rb.transform();
  for (std::size_t i = 0; i < st_diff.w_on.size(); ++i) {
    CHECK(st_diff.w_on[i] == doctest::Approx(st_sub.w_on[i]).epsilon(1e-12));
    CHECK(st_diff.dwdn[i] == doctest::Approx(st_sub.dwdn[i]).epsilon(1e-12));
  }
}

}  // TEST_SUITE
