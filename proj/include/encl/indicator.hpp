#ifndef ENCL_INDICATOR_HPP
#define ENCL_INDICATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "encl/laplace.hpp"
#include "encl/probe.hpp"
#include "encl/surface.hpp"

namespace encl {

enum class ObstacleKind { SoundHard, PenetrableSlow, PenetrableFast };

/// Sign the theory predicts for the boundary functional: positive for
/// sound-hard and contrast below 1, negative for contrast above 1.
int predicted_sign(ObstacleKind kind);

ObstacleKind penetrable_kind(double contrast);  // contrast != 1

enum class SignVerdict { Consistent, Inconsistent, Indeterminate };
enum class SignConsensus { Positive, Negative, Mixed };

struct IndicatorEntry {
  double tau = 0.0;
  double value = 0.0;    // boundary functional at this tau
  double log_abs = 0.0;  // valid only above the floor
  double naive_d = 0.0;  // -log|value| / (2 tau)
  double floor = 0.0;    // exclusion threshold used
  bool above_floor = false;
  bool used_in_fit = false;
};

struct IndicatorFit {
  double d_hat = 0.0;
  double q_hat = 0.0;
  double c_hat = 0.0;
  double residual = 0.0;  // rms of log-residuals over the fitted window
  double tau_lo = 0.0, tau_hi = 0.0;
  int n_used = 0;
  double naive_d_at_max_tau = 0.0;
};

struct IndicatorSeries {
  std::vector<IndicatorEntry> entries;
  SignConsensus consensus = SignConsensus::Mixed;
  std::optional<IndicatorFit> fit;
};

/// Boundary functional sum(weight * (dv/dn * w - dw/dn * v)) with the probe
/// field evaluated in closed form at the nodes. Throws missing_tau.
double compute_indicator(const SurfacePatchSet& patches,
                         const SurfaceTransform& transform,
                         const ProbeBall& probe, double tau);

/// Exclusion threshold under which an indicator value is treated as noise.
/// With a background-subtracted transform the measured obstacle-free
/// functional |I_ref(tau)| scales the cancellation noise and drives the
/// floor; otherwise the analytic truncation bound factor*e^{-tau T}*
/// max|u(T)|*area applies.
struct FloorPolicy {
  double factor = 1e3;  // multiple of the analytic truncation bound
  double max_abs_u_final = 0.0;
  double T = 0.0;
  double area = 0.0;
  // The differenced series carries roundoff at machine epsilon relative to
  // the direct field, so the measured noise scales as eps * |I_ref|.
  double reference_factor = 5e-15;
  std::vector<double> taus;               // set when reference values exist
  std::vector<double> reference_values;   // |I| of the obstacle-free transform
  double floor(double tau) const;
};

/// Evaluate the functional across the transform's tau batch, flag entries
/// below the truncation floor, and classify the sign consensus of the rest.
IndicatorSeries build_series(const SurfacePatchSet& patches,
                             const SurfaceTransform& transform,
                             const ProbeBall& probe, const FloorPolicy& floor);

/// Compare the consensus against the theorem-predicted sign for this
/// obstacle kind; Indeterminate when fewer than 4 usable entries exist.
SignVerdict classify_sign(const IndicatorSeries& series, ObstacleKind kind);

/// Least squares of log|I| = -2 d tau + q log tau + c over the usable
/// window. The free log-tau power soaks up the unknown polynomial prefactor.
/// Throws insufficient_data (< 4 usable points) or sign_inconsistent.
IndicatorFit extract_distance(IndicatorSeries& series);

const char* to_string(SignVerdict v);
const char* to_string(SignConsensus c);

}  // namespace encl

#endif
