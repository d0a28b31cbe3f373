#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "encl/errors.hpp"
#include "encl/fields.hpp"
#include "encl/probe.hpp"

using namespace encl;

TEST_SUITE("probe") {

TEST_CASE("small-tau exterior limit is the Newtonian ball potential") {
  ProbeBall probe{{0, 0, 0}, 0.8, 2.0};
  for (double r : {1.5, 2.5, 4.0}) {
    double v = v_closed({probe, 1e-3}, {r, 0, 0});
    double newton = probe.amplitude * probe.radius * probe.radius * probe.radius / (3.0 * r);
    CHECK(v == doctest::Approx(newton).epsilon(5e-3));
  }
}

TEST_CASE("closed form agrees with the shell quadrature oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> utau(1.0, 12.0), ueta(0.2, 1.0),
      ud(0.1, 3.0), uu(-1, 1);
  for (int i = 0; i < 30; ++i) {
    ProbeBall probe{{uu(rng), uu(rng), uu(rng)}, ueta(rng), (i % 2 ? -1.5 : 1.0)};
    double tau = utau(rng);
    Vec3 dir = Vec3{uu(rng), uu(rng), uu(rng)}.normalized();
    Vec3 x = probe.center + dir * (ud(rng) * probe.radius);
    double closed = v_closed({probe, tau}, x);
    QuadResult q = v_quadrature(probe, tau, x, 1e-8);
    CHECK(std::fabs(closed - q.value) <= 1e-6 * std::fabs(q.value));
  }
}

TEST_CASE("zero amplitude gives the zero field") {
  ProbeBall probe{{0, 0, 0}, 0.5, 0.0};
  CHECK(v_closed({probe, 3.0}, {1, 0, 0}) == 0.0);
  CHECK(v_quadrature(probe, 3.0, {1, 0, 0}, 1e-6).value == 0.0);
}

TEST_CASE("quadrature scales linearly in the amplitude") {
  ProbeBall p1{{0, 0, 0}, 0.5, 1.0};
  ProbeBall p3{{0, 0, 0}, 0.5, 3.0};
  double a = v_quadrature(p1, 4.0, {1.2, 0.3, 0}, 1e-8).value;
  double b = v_quadrature(p3, 4.0, {1.2, 0.3, 0}, 1e-8).value;
  CHECK(b == doctest::Approx(3.0 * a).epsilon(1e-9));
}

TEST_CASE("interior center value") {
  ProbeBall probe{{0, 0, 0}, 0.7, 1.0};
  double tau = 2.5;
  double m = tau * probe.radius;
  double expect = probe.amplitude / (tau * tau) * (1.0 - (1.0 + m) * std::exp(-m));
  CHECK(v_closed({probe, tau}, {0, 0, 0}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(v_quadrature(probe, tau, {0, 0, 0}, 1e-8).value ==
        doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("interior and exterior branches match to C1 at the ball boundary") {
  ProbeBall probe{{0, 0, 0}, 0.6, 1.0};
  // One ulp below the radius selects the interior branch at the boundary.
  const double r_in = std::nextafter(probe.radius, 0.0);
  for (double tau : {1.0, 5.0, 11.0}) {
    ProbeField f{probe, tau};
    double inside = v_closed(f, {r_in, 0, 0});
    double outside = v_closed(f, {probe.radius, 0, 0});
    CHECK(std::fabs(inside - outside) <= 1e-10 * std::fabs(outside));
    double g_in = grad_v_closed_radial_scaled(f, r_in, 0.0);
    double g_out = grad_v_closed_radial_scaled(f, probe.radius, 0.0);
    CHECK(std::fabs(g_in - g_out) <= 1e-10 * std::fabs(g_out));
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uu(-1, 1);
  ProbeBall probe{{0.2, -0.1, 0.4}, 0.5, 1.3};
  for (double tau : {1.0, 4.0, 8.0}) {
    ProbeField f{probe, tau};
    for (int i = 0; i < 12; ++i) {
      Vec3 x = probe.center + Vec3{uu(rng), uu(rng), uu(rng)}.normalized() *
                                  (0.2 + 2.0 * std::fabs(uu(rng)));
      const double d = 1e-5;
      Vec3 g = grad_v_closed(f, x);
      Vec3 fd{(v_closed(f, x + Vec3{d, 0, 0}) - v_closed(f, x - Vec3{d, 0, 0})) / (2 * d),
              (v_closed(f, x + Vec3{0, d, 0}) - v_closed(f, x - Vec3{0, d, 0})) / (2 * d),
              (v_closed(f, x + Vec3{0, 0, d}) - v_closed(f, x - Vec3{0, 0, d})) / (2 * d)};
      CHECK((g - fd).norm() <= 1e-6 * std::fmax(fd.norm(), 1e-12));
    }
  }
}

TEST_CASE("gradient vanishes at the ball center by symmetry") {
  ProbeBall probe{{1, 2, 3}, 0.5, 1.0};
  Vec3 g = grad_v_closed({probe, 6.0}, {1, 2, 3});
  CHECK(g.norm() == 0.0);
}

TEST_CASE("exterior gradient obeys the kernel bound") {
  ProbeBall probe{{0, 0, 0}, 0.5, 1.0};
  double l1 = probe.amplitude * 4.0 / 3.0 * M_PI * std::pow(probe.radius, 3);
  for (double tau : {2.0, 6.0, 10.0}) {
    for (double r : {0.8, 1.5, 3.0, 6.0}) {
      double db = r - probe.radius;
      double bound = std::exp(-tau * db) / (4 * M_PI) * (tau + 1.0 / (db * db)) * l1;
      CHECK(grad_v_closed({probe, tau}, {r, 0, 0}).norm() <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("positivity and radial monotonicity outside the ball") {
  ProbeBall probe{{0, 0, 0}, 0.5, 2.0};
  ProbeField f{probe, 7.0};
  double prev = v_closed(f, {0.51, 0, 0});
  CHECK(prev > 0.0);
  for (double r = 0.6; r < 4.0; r += 0.1) {
    double v = v_closed(f, {r, 0, 0});
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("log decay slope recovers the ball distance") {
  ProbeBall probe{{0, 0, 0}, 0.5, 1.0};
  Vec3 x{2.7, 0.4, -0.3};
  double db = (x - probe.center).norm() - probe.radius;
  // Fit log v = a tau + b log tau + c over [6, 12].
  std::vector<double> taus, ys;
  for (double tau = 6.0; tau <= 12.0; tau += 0.5) {
    taus.push_back(tau);
    ys.push_back(std::log(v_closed({probe, tau}, x)));
  }
  double m[3][3] = {};
  double rhs[3] = {};
  for (std::size_t i = 0; i < taus.size(); ++i) {
    double row[3] = {taus[i], std::log(taus[i]), 1.0};
    for (int a = 0; a < 3; ++a) {
      rhs[a] += row[a] * ys[i];
      for (int b = 0; b < 3; ++b) m[a][b] += row[a] * row[b];
    }
  }
  // Solve the 3x3 system by elimination.
  for (int col = 0; col < 3; ++col) {
    for (int r = col + 1; r < 3; ++r) {
      double fpiv = m[r][col] / m[col][col];
      for (int c2 = 0; c2 < 3; ++c2) m[r][c2] -= fpiv * m[col][c2];
      rhs[r] -= fpiv * rhs[col];
    }
  }
  double c2v = rhs[2] / m[2][2];
  double b2v = (rhs[1] - m[1][2] * c2v) / m[1][1];
  double a2v = (rhs[0] - m[0][1] * b2v - m[0][2] * c2v) / m[0][0];
  CHECK(std::fabs(-a2v - db) / db < 0.02);
}

TEST_CASE("discrete residual of the closed form shrinks at second order") {
  ProbeBall probe{{0, 0, 0}, 0.5, 1.0};
  double tau = 3.0;
  ProbeField f{probe, tau};
  double errs[2];
  int idx = 0;
  for (double h : {0.04, 0.02}) {
    Grid3 g = Grid3::from_bounds({0.8, -0.6, -0.6}, {2.0, 0.6, 0.6}, h);
    double max_res = 0.0;
    for (int k = 1; k + 1 < g.nz; ++k)
      for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
          Vec3 c = g.center(i, j, k);
          if ((c - probe.center).norm() < probe.radius + 3 * h) continue;
          double lap = (v_closed(f, c + Vec3{h, 0, 0}) + v_closed(f, c - Vec3{h, 0, 0}) +
                        v_closed(f, c + Vec3{0, h, 0}) + v_closed(f, c - Vec3{0, h, 0}) +
                        v_closed(f, c + Vec3{0, 0, h}) + v_closed(f, c - Vec3{0, 0, h}) -
                        6.0 * v_closed(f, c)) /
                       (h * h);
          max_res = std::fmax(max_res, std::fabs(lap - tau * tau * v_closed(f, c)));
        }
    errs[idx++] = max_res;
  }
  double order = std::log2(errs[0] / errs[1]);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}

TEST_CASE("decay-compensated obstacle energies stay in a positive band") {
  Shape obstacle = Shape::sphere({0, 0, 0}, 0.6);
  ProbeBall probe{{3, 0, 0}, 0.5, 1.0};  // dist = 1.9
  Grid3 grid = Grid3::from_bounds({-0.65, -0.65, -0.65}, {0.65, 0.65, 0.65}, 0.02);
  std::vector<double> j0s, j1s;
  for (double tau : {4.0, 6.0, 8.0, 10.0, 12.0}) {
    LemmaFunctionals lf = lemma_functionals({probe, tau}, obstacle, grid);
    CHECK(lf.dist == doctest::Approx(1.9));
    CHECK(lf.j0 > 0.0);
    CHECK(lf.j1 > 0.0);
    j0s.push_back(lf.j0);
    j1s.push_back(lf.j1);
  }
  auto [lo0, hi0] = std::minmax_element(j0s.begin(), j0s.end());
  auto [lo1, hi1] = std::minmax_element(j1s.begin(), j1s.end());
  CHECK(*hi0 / *lo0 < 10.0);
  CHECK(*hi1 / *lo1 < 10.0);
}

TEST_CASE("interior field energy decays with the separation at rate 2 tau") {
  Shape near_d = Shape::sphere({0, 0, 0}, 0.5);
  Shape far_d = Shape::sphere({0, 0, 0}, 0.5);
  double tau = 8.0;
  Grid3 grid = Grid3::from_bounds({-0.55, -0.55, -0.55}, {0.55, 0.55, 0.55}, 0.02);
  ProbeBall near_b{{2.0, 0, 0}, 0.3, 1.0};  // dist 1.2
  ProbeBall far_b{{3.2, 0, 0}, 0.3, 1.0};   // dist 2.4
  LemmaFunctionals a = lemma_functionals({near_b, tau}, near_d, grid);
  LemmaFunctionals b = lemma_functionals({far_b, tau}, far_d, grid);
  // Undo the compensation to compare raw integrals.
  double int_near = a.j0 / (std::pow(tau, 6) * std::exp(2 * tau * a.dist));
  double int_far = b.j0 / (std::pow(tau, 6) * std::exp(2 * tau * b.dist));
  double slope = std::log(int_near / int_far) / (2 * tau * (b.dist - a.dist));
  CHECK(slope == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("overlapping probe and obstacle are rejected") {
  Grid3 grid = Grid3::from_bounds({-1, -1, -1}, {1, 1, 1}, 0.05);
  CHECK_THROWS_AS(
      lemma_functionals({ProbeBall{{0.5, 0, 0}, 0.5, 1.0}, 4.0},
                        Shape::sphere({0, 0, 0}, 0.6), grid),
      Error);
}

TEST_CASE("quadrature tolerance domain") {
  ProbeBall probe{{0, 0, 0}, 0.5, 1.0};
  CHECK_THROWS_AS(v_quadrature(probe, 2.0, {1, 0, 0}, 1e-12), Error);
  CHECK_THROWS_AS(v_quadrature(probe, 2.0, {1, 0, 0}, 0.5), Error);
}

}  // TEST_SUITE
