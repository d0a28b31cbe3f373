#ifndef ENCL_PROBE_HPP
#define ENCL_PROBE_HPP

#include "encl/grid.hpp"
#include "encl/shape.hpp"
#include "encl/vec3.hpp"

namespace encl {

/// Source ball: the initial velocity is amplitude * indicator(ball). The
/// amplitude must be nonzero and one-signed by construction.
struct ProbeBall {
  Vec3 center;
  double radius = 0.5;
  double amplitude = 1.0;

  Shape shape() const { return Shape::sphere(center, radius); }
};

/// Decaying solution of (laplacian - tau^2) v = -amplitude * indicator(ball),
/// evaluated from the radial closed form about the ball center.
struct ProbeField {
  ProbeBall probe;
  double tau = 1.0;
};

double v_closed(const ProbeField& field, const Vec3& x);
Vec3 grad_v_closed(const ProbeField& field, const Vec3& x);

/// v_closed(x) * exp(tau*shift): exponent folded analytically so values stay
/// representable when compensating the decay.
double v_closed_scaled(const ProbeField& field, const Vec3& x, double shift);
double grad_v_closed_radial_scaled(const ProbeField& field, double r, double shift);

/// Independent check of the closed form: adaptive quadrature of the kernel
/// integral reduced over spherical shells about x. The relative error
/// estimate is driven below tol. Throws singular_point on non-convergence.
struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};
QuadResult v_quadrature(const ProbeBall& probe, double tau, const Vec3& x,
                        double tol);

/// Decay-compensated interior energies of the probe field over the obstacle:
/// j0 = tau^6 exp(2 tau dist(D,B)) * integral of v^2 over D,
/// j1 = tau^4 exp(2 tau dist(D,B)) * integral of |grad v|^2 over D.
/// Midpoint quadrature with boundary cells weighted by their covered
/// fraction. Throws overlap_error when dist(D,B) is 0.
struct LemmaFunctionals {
  double j0 = 0.0;
  double j1 = 0.0;
  double dist = 0.0;
};
LemmaFunctionals lemma_functionals(const ProbeField& field, const Shape& obstacle,
                                   const Grid3& grid);

/// Area of the intersection of the sphere of radius t about x with the ball
/// (|x - ball center| = d); the spherical-cap lens formula.
double sphere_ball_cap_area(double d, double t, double eta);

}  // namespace encl

#endif
