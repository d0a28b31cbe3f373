#include "encl/indicator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "encl/errors.hpp"

namespace encl {

int predicted_sign(ObstacleKind kind) {
  return kind == ObstacleKind::PenetrableFast ? -1 : +1;
}

ObstacleKind penetrable_kind(double contrast) {
  if (contrast <= 0.0) fail(Errc::non_positive_contrast, "contrast must be positive");
  if (contrast == 1.0)
    fail(Errc::config_error, "contrast 1 is indistinguishable from free space");
  return contrast < 1.0 ? ObstacleKind::PenetrableSlow : ObstacleKind::PenetrableFast;
}

double compute_indicator(const SurfacePatchSet& patches,
                         const SurfaceTransform& transform,
                         const ProbeBall& probe, double tau) {
  const std::size_t ti = transform.tau_index(tau);
  ProbeField field{probe, tau};
  double sum = 0.0, comp = 0.0;
  for (std::size_t n = 0; n < patches.nodes.size(); ++n) {
    const auto& node = patches.nodes[n];
    double v = v_closed(field, node.position);
    double dvdn = grad_v_closed(field, node.position).dot(node.normal);
    double term = node.weight * (dvdn * transform.at_on(ti, n) -
                                 transform.at_dwdn(ti, n) * v);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double FloorPolicy::floor(double tau) const {
  if (!reference_values.empty()) {
    for (std::size_t i = 0; i < taus.size(); ++i)
      if (std::fabs(taus[i] - tau) <= 1e-12 * std::fmax(1.0, std::fabs(tau)))
        return reference_factor * std::fabs(reference_values[i]);
    fail(Errc::missing_tau, "no reference floor recorded for this tau");
  }
  return factor * std::exp(-tau * T) * max_abs_u_final * area;
}

IndicatorSeries build_series(const SurfacePatchSet& patches,
                             const SurfaceTransform& transform,
                             const ProbeBall& probe, const FloorPolicy& floor) {
  IndicatorSeries series;
  bool any_pos = false, any_neg = false;
  for (double tau : transform.taus) {
    IndicatorEntry e;
    e.tau = tau;
    e.value = compute_indicator(patches, transform, probe, tau);
    e.floor = floor.floor(tau);
    e.above_floor = std::fabs(e.value) > e.floor && e.value != 0.0;
    if (e.above_floor) {
      e.log_abs = std::log(std::fabs(e.value));
      e.naive_d = -e.log_abs / (2.0 * tau);
      (e.value > 0 ? any_pos : any_neg) = true;
    }
    series.entries.push_back(e);
  }
  if (any_pos && !any_neg) series.consensus = SignConsensus::Positive;
  else if (any_neg && !any_pos) series.consensus = SignConsensus::Negative;
  else series.consensus = SignConsensus::Mixed;
  return series;
}

SignVerdict classify_sign(const IndicatorSeries& series, ObstacleKind kind) {
  int usable = 0;
  for (const auto& e : series.entries) usable += e.above_floor ? 1 : 0;
  if (usable < 4) return SignVerdict::Indeterminate;
  if (series.consensus == SignConsensus::Mixed) return SignVerdict::Inconsistent;
  int sign = series.consensus == SignConsensus::Positive ? +1 : -1;
  return sign == predicted_sign(kind) ? SignVerdict::Consistent
                                      : SignVerdict::Inconsistent;
}

IndicatorFit extract_distance(IndicatorSeries& series) {
  std::vector<IndicatorEntry*> used;
  for (auto& e : series.entries)
    if (e.above_floor) used.push_back(&e);
  if (used.size() < 4)
    fail(Errc::insufficient_data, "need at least 4 entries above the floor");
  if (series.consensus == SignConsensus::Mixed)
    fail(Errc::sign_inconsistent, "indicator sign flips inside the window");

  // Normal equations for log|I| ~ a*tau + q*log(tau) + c, then d = -a/2.
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> rhs{};
  for (auto* e : used) {
    const double row[3] = {e->tau, std::log(e->tau), 1.0};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += row[i] * e->log_abs;
      for (int j = 0; j < 3; ++j) m[i][j] += row[i] * row[j];
    }
  }
  // 3x3 Gaussian elimination with partial pivoting.
  std::array<std::array<double, 4>, 3> aug{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) aug[i][j] = m[i][j];
    aug[i][3] = rhs[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
    std::swap(aug[col], aug[piv]);
    if (std::fabs(aug[col][col]) < 1e-30)
      fail(Errc::insufficient_data, "degenerate tau spacing");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double f = aug[r][col] / aug[col][col];
      for (int j = col; j < 4; ++j) aug[r][j] -= f * aug[col][j];
    }
  }
  const double a = aug[0][3] / aug[0][0];
  const double q = aug[1][3] / aug[1][1];
  const double c = aug[2][3] / aug[2][2];

  IndicatorFit fit;
  fit.d_hat = -0.5 * a;
  fit.q_hat = q;
  fit.c_hat = c;
  fit.n_used = (int)used.size();
  fit.tau_lo = used.front()->tau;
  fit.tau_hi = used.back()->tau;
  double ss = 0.0;
  for (auto* e : used) {
    double pred = a * e->tau + q * std::log(e->tau) + c;
    double r = e->log_abs - pred;
    ss += r * r;
    e->used_in_fit = true;
  }
  fit.residual = std::sqrt(ss / used.size());
  fit.naive_d_at_max_tau = used.back()->naive_d;
  series.fit = fit;
  return fit;
}

const char* to_string(SignVerdict v) {
  switch (v) {
    case SignVerdict::Consistent: return "consistent";
    case SignVerdict::Inconsistent: return "inconsistent";
    default: return "indeterminate";
  }
}

const char* to_string(SignConsensus c) {
  switch (c) {
    case SignConsensus::Positive: return "positive";
    case SignConsensus::Negative: return "negative";
    default: return "mixed";
  }
}

}  // namespace encl
