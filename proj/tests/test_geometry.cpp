#include <random>

#include "doctest.h"
#include "encl/errors.hpp"
#include "encl/shape.hpp"

using namespace encl;

namespace {

// Brute-force set distance from dense boundary clouds, independent of the
// projection-based search it checks.
double brute_force_dist(const Shape& a, const Shape& b, int samples) {
  double best = 1e300;
  auto pa = a.boundary_samples(samples);
  auto pb = b.boundary_samples(samples);
  for (const auto& x : pa)
    for (const auto& y : pb) best = std::fmin(best, (x - y).norm2());
  return std::sqrt(best);
}

double brute_force_broken_path(const Shape& b, const Shape& d, const Shape& omega,
                               int samples) {
  double best = 1e300;
  for (const auto& y : d.boundary_samples(samples)) {
    double f = b.boundary_distance(y) + omega.boundary_distance(y);
    best = std::fmin(best, f);
  }
  return best;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("sphere sdf sign convention") {
  Shape s = Shape::sphere({1, 2, 3}, 0.5);
  CHECK(s.sdf({1, 2, 3}) < 0.0);
  CHECK(s.sdf({1, 2, 3 + 1.0}) > 0.0);
  CHECK(s.sdf({1.5, 2, 3}) == doctest::Approx(0.0));
}

TEST_CASE("box sdf is the exact distance outside and inside") {
  Shape b = Shape::box({-1, -2, -3}, {1, 2, 3});
  CHECK(b.sdf({3, 0, 0}) == doctest::Approx(2.0));
  CHECK(b.sdf({2, 3, 0}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(b.sdf({0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(b.sdf({0.9, 0, 0}) == doctest::Approx(-0.1));
}

TEST_CASE("sphere-sphere distance matches the closed form") {
  Shape a = Shape::sphere({0, 0, 0}, 1.0);
  Shape b = Shape::sphere({5, 0, 0}, 1.0);
  CHECK(dist_sets(a, b) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(dist_sets(a, a) == doctest::Approx(0.0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0), ur(0.2, 1.5);
  for (int i = 0; i < 50; ++i) {
    Shape s1 = Shape::sphere({u(rng), u(rng), u(rng)}, ur(rng));
    Shape s2 = Shape::sphere({u(rng), u(rng), u(rng)}, ur(rng));
    const auto& c1 = std::get<Sphere>(s1.variant());
    const auto& c2 = std::get<Sphere>(s2.variant());
    double expect = std::fmax(0.0, (c1.center - c2.center).norm() - c1.radius - c2.radius);
    CHECK(dist_sets(s1, s2) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("sphere-box distance agrees with brute force") {
  Shape s = Shape::sphere({0, 0, 0}, 1.0);
  Shape b = Shape::box({2, -1, -1}, {3, 1, 1});
  double brute = brute_force_dist(s, b, 8000);
  double d = dist_sets(s, b);
  CHECK(d == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d <= brute + 1e-9);
  CHECK(d >= brute - 0.05);  // brute force is only sample-resolution accurate
}

TEST_CASE("overlapping and touching sets have distance zero") {
  CHECK(dist_sets(Shape::sphere({0, 0, 0}, 1.0), Shape::sphere({1.5, 0, 0}, 1.0)) == 0.0);
  CHECK(dist_sets(Shape::sphere({0, 0, 0}, 1.0), Shape::box({-3, -3, -3}, {3, 3, 3})) == 0.0);
}

TEST_CASE("point distance") {
  Shape s = Shape::sphere({0, 0, 0}, 1.0);
  CHECK(d_point(s, {3, 0, 0}) == doctest::Approx(2.0));
  CHECK(d_point(s, {0.2, 0, 0}) == 0.0);
  Shape u = Shape::unite({Shape::sphere({4, 0, 0}, 1.0), Shape::sphere({-4, 0, 0}, 1.0)});
  CHECK(d_point(u, {0, 0, 0}) == doctest::Approx(3.0));
}

TEST_CASE("point distance equals set distance to a tiny ball") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Shape s = Shape::sphere({0.5, -0.25, 1.0}, 0.8);
  for (int i = 0; i < 20; ++i) {
    Vec3 p{u(rng), u(rng), u(rng)};
    double eps = 1e-6;
    double via_ball = dist_sets(s, Shape::sphere(p, eps));
    CHECK(d_point(s, p) == doctest::Approx(via_ball).epsilon(1e-4).scale(1.0));
  }
}

TEST_CASE("broken path through aligned spheres") {
  Shape b = Shape::sphere({6, 0, 0}, 1.0);
  Shape d = Shape::sphere({0, 0, 0}, 1.0);
  Shape omega = Shape::sphere({0, 0, 0}, 3.0);
  double l = broken_path_length(b, d, omega);
  CHECK(l == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(l <= brute_force_broken_path(b, d, omega, 20000) + 1e-9);
}

TEST_CASE("broken path degenerate tangency") {
  // Obstacle touching the surface: the second leg vanishes at the tangent
  // point, leaving the probe-to-obstacle leg.
  Shape omega = Shape::sphere({0, 0, 0}, 2.0);
  Shape d = Shape::sphere({1, 0, 0}, 1.0);
  Shape b = Shape::sphere({5, 0, 0}, 0.5);
  CHECK(broken_path_length(b, d, omega) == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("minimum observation time arithmetic") {
  Shape d = Shape::sphere({0, 0, 0}, 1.0);
  Shape b = Shape::sphere({6, 0, 0}, 0.5);
  Shape omega = Shape::sphere({0, 0, 0}, 3.0);
  CHECK(min_observation_time(d, b, omega) == doctest::Approx(2 * 4.5 - 2.5));
  // Probe touching the surface: the subtracted term vanishes.
  Shape b2 = Shape::sphere({3.5, 0, 0}, 0.5);
  CHECK(min_observation_time(d, b2, omega) == doctest::Approx(2 * dist_sets(d, b2)));
}

TEST_CASE("path inequality over random admissible sphere scenes") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto dir = [&]() {
    double z = 2 * u01(rng) - 1, phi = 2 * M_PI * u01(rng);
    double s = std::sqrt(std::fmax(0.0, 1 - z * z));
    return Vec3{s * std::cos(phi), s * std::sin(phi), z};
  };
  for (int i = 0; i < 200; ++i) {
    double r_omega = 1.0 + 2.0 * u01(rng);
    double r_d = 0.15 + 0.3 * r_omega * u01(rng);
    double off = u01(rng) * (r_omega - r_d - 0.05);
    Shape omega = Shape::sphere({0, 0, 0}, r_omega);
    Shape d = Shape::sphere(dir() * off, r_d);
    double eta = 0.1 + 0.5 * u01(rng);
    Shape b = Shape::sphere(dir() * (r_omega + 0.1 + 2.0 * u01(rng) + eta), eta);
    double lhs = 2.0 * dist_sets(d, b) - dist_sets(omega, b);
    double scale = r_omega + eta + 4.0;
    CHECK(lhs >= broken_path_length(b, d, omega) - 1e-6 * scale);
  }
}

TEST_CASE("union sdf flags overlapping parts") {
  Shape disjoint = Shape::unite({Shape::sphere({0, 0, 0}, 1.0), Shape::sphere({3, 0, 0}, 1.0)});
  CHECK(disjoint.sdf_exact_inside());
  Shape overlapping = Shape::unite({Shape::sphere({0, 0, 0}, 1.0), Shape::sphere({1, 0, 0}, 1.0)});
  CHECK_FALSE(overlapping.sdf_exact_inside());
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(Shape::sphere({0, 0, 0}, -1.0), Error);
  CHECK_THROWS_AS(Shape::box({1, 0, 0}, {0, 1, 1}), Error);
  CHECK_THROWS_AS(Shape::unite({}), Error);
}

}  // TEST_SUITE
