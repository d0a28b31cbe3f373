#include "encl/probe.hpp"

#include <cmath>

#include "encl/errors.hpp"
#include "encl/fields.hpp"

namespace encl {

namespace {

// sinh(x)/x with the analytic limit at 0.
double sinhc(double x) {
  if (std::fabs(x) < 1e-4) {
    double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

}  // namespace

double v_closed_scaled(const ProbeField& field, const Vec3& x, double shift) {
  const double tau = field.tau;
  const double eta = field.probe.radius;
  const double amp = field.probe.amplitude;
  const double r = (x - field.probe.center).norm();
  const double m = tau * eta;
  if (r >= eta) {
    // (amp/tau^3) * (m cosh m - sinh m) * e^{-tau (r - shift)} / r
    double g = m * std::cosh(m) - std::sinh(m);
    return amp / (tau * tau * tau) * g * std::exp(-tau * (r - shift)) / r;
  }
  double inner = 1.0 - (1.0 + m) * std::exp(-m) * sinhc(tau * r);
  return amp / (tau * tau) * inner * std::exp(tau * shift);
}

double v_closed(const ProbeField& field, const Vec3& x) {
  return v_closed_scaled(field, x, 0.0);
}

double grad_v_closed_radial_scaled(const ProbeField& field, double r,
                                   double shift) {
  const double tau = field.tau;
  const double eta = field.probe.radius;
  const double amp = field.probe.amplitude;
  const double m = tau * eta;
  if (r >= eta) {
    double g = m * std::cosh(m) - std::sinh(m);
    return -amp / (tau * tau * tau) * g * std::exp(-tau * (r - shift)) *
           (tau * r + 1.0) / (r * r);
  }
  double b = -amp / (tau * tau * tau) * (1.0 + m) * std::exp(-m);
  double tr = tau * r;
  double core;
  if (tr < 1e-4) {
    // (tr cosh tr - sinh tr)/r^2 = tau^3 r/3 + O(r^3)
    core = tau * tau * tau * r * (1.0 / 3.0 + tr * tr / 30.0);
  } else {
    core = (tr * std::cosh(tr) - std::sinh(tr)) / (r * r);
  }
  return b * core * std::exp(tau * shift);
}

Vec3 grad_v_closed(const ProbeField& field, const Vec3& x) {
  Vec3 d = x - field.probe.center;
  double r = d.norm();
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return d * (grad_v_closed_radial_scaled(field, r, 0.0) / r);
}

double sphere_ball_cap_area(double d, double t, double eta) {
  if (t <= 0.0) return 0.0;
  if (d < 1e-300) return t < eta ? 4.0 * M_PI * t * t : 0.0;
  if (t <= eta - d) return 4.0 * M_PI * t * t;  // sphere fully inside the ball
  if (t <= std::fabs(d - eta) || t >= d + eta) return 0.0;
  return M_PI * t / d * (eta * eta - (d - t) * (d - t));
}

namespace {

struct ShellIntegrand {
  double amp, tau, d, eta;
  double operator()(double s) const {
    if (s <= 0.0) return 0.0;  // limit of amp * e^{-tau s} * s
    return amp * std::exp(-tau * s) * sphere_ball_cap_area(d, s, eta) /
           (4.0 * M_PI * s);
  }
};

double adaptive_simpson(const ShellIntegrand& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth, long& evals) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  evals += 2;
  if (evals > 2'000'000)
    fail(Errc::singular_point, "shell quadrature failed to converge");
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double err = left + right - whole;
  if (depth <= 0 || std::fabs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals);
}

}  // namespace

QuadResult v_quadrature(const ProbeBall& probe, double tau, const Vec3& x,
                        double tol) {
  if (tol < 1e-10 || tol > 1e-3)
    fail(Errc::config_error, "quadrature tolerance must lie in [1e-10, 1e-3]");
  const double d = (x - probe.center).norm();
  const double eta = probe.radius;
  ShellIntegrand f{probe.amplitude, tau, d, eta};
  double a = std::fmax(0.0, d - eta);
  double b = d + eta;

  // Coarse pass to scale the absolute tolerance.
  double coarse = 0.0;
  const int n0 = 64;
  for (int i = 0; i < n0; ++i) coarse += f(a + (i + 0.5) / n0 * (b - a));
  coarse *= (b - a) / n0;
  double abs_tol = std::fmax(tol * std::fabs(coarse), 1e-300);

  long evals = 0;
  double total = 0.0;
  // Split at the interior kink where the shell stops being a full sphere.
  double knots[3] = {a, b, b};
  int nseg = 1;
  if (d < eta && eta - d > a && eta - d < b) {
    knots[1] = eta - d;
    knots[2] = b;
    nseg = 2;
  }
  for (int s = 0; s < nseg; ++s) {
    double lo = knots[s], hi = knots[s + 1];
    double m = 0.5 * (lo + hi);
    double flo = f(lo), fm = f(m), fhi = f(hi);
    evals += 3;
    double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += adaptive_simpson(f, lo, hi, flo, fm, fhi, whole,
                              abs_tol / nseg, 48, evals);
  }
  return {total, tol * std::fabs(total)};
}

LemmaFunctionals lemma_functionals(const ProbeField& field, const Shape& obstacle,
                                   const Grid3& grid) {
  double dist = dist_sets(obstacle, field.probe.shape());
  if (dist <= 0.0)
    fail(Errc::overlap_error, "obstacle and probe ball must be separated");

  const double tau = field.tau;
  const double h = grid.h;
  double sum_v2 = 0.0, sum_g2 = 0.0;
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        Vec3 c = grid.center(i, j, k);
        double frac = cell_cover_fraction(obstacle.sdf(c), h);
        if (frac <= 0.0) continue;
        double w = frac * h * h * h;
        double vs = v_closed_scaled(field, c, dist);
        double r = (c - field.probe.center).norm();
        double gs = grad_v_closed_radial_scaled(field, r, dist);
        sum_v2 += w * vs * vs;
        sum_g2 += w * gs * gs;
      }
  double t2 = tau * tau;
  LemmaFunctionals out;
  out.dist = dist;
  out.j0 = t2 * t2 * t2 * sum_v2;
  out.j1 = t2 * t2 * sum_g2;
  return out;
}

}  // namespace encl
