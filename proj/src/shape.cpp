#include "encl/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "encl/errors.hpp"

namespace encl {

namespace {

double sphere_sdf(const Sphere& s, const Vec3& p) {
  return (p - s.center).norm() - s.radius;
}

double box_sdf(const AxisBox& b, const Vec3& p) {
  Vec3 c = (b.lo + b.hi) * 0.5;
  Vec3 half = (b.hi - b.lo) * 0.5;
  Vec3 q{std::fabs(p.x - c.x) - half.x, std::fabs(p.y - c.y) - half.y,
         std::fabs(p.z - c.z) - half.z};
  Vec3 qpos = cwise_max(q, Vec3{0, 0, 0});
  double outside = qpos.norm();
  double inside = std::fmin(std::fmax(q.x, std::fmax(q.y, q.z)), 0.0);
  return outside + inside;
}

Vec3 sphere_closest(const Sphere& s, const Vec3& p) {
  return s.center + (p - s.center).normalized() * s.radius;
}

Vec3 box_closest(const AxisBox& b, const Vec3& p) {
  Vec3 clamped{std::clamp(p.x, b.lo.x, b.hi.x), std::clamp(p.y, b.lo.y, b.hi.y),
               std::clamp(p.z, b.lo.z, b.hi.z)};
  if (box_sdf(b, p) > 0.0) return clamped;
  // Inside: push to the nearest face along one axis.
  double best = std::numeric_limits<double>::max();
  Vec3 q = clamped;
  const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
  const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
  const double pc[3] = {p.x, p.y, p.z};
  int axis = 0;
  double target = lo[0];
  for (int a = 0; a < 3; ++a) {
    double dlo = pc[a] - lo[a];
    double dhi = hi[a] - pc[a];
    if (dlo < best) { best = dlo; axis = a; target = lo[a]; }
    if (dhi < best) { best = dhi; axis = a; target = hi[a]; }
  }
  if (axis == 0) q.x = target;
  if (axis == 1) q.y = target;
  if (axis == 2) q.z = target;
  return q;
}

}  // namespace

Shape::Shape(Sphere s) : v_(std::move(s)) {
  if (std::get<Sphere>(v_).radius <= 0.0)
    fail(Errc::config_error, "sphere radius must be positive");
}

Shape::Shape(AxisBox b) : v_(std::move(b)) {
  const auto& box = std::get<AxisBox>(v_);
  if (!(box.lo.x < box.hi.x && box.lo.y < box.hi.y && box.lo.z < box.hi.z))
    fail(Errc::config_error, "box lo must be strictly below hi componentwise");
}

Shape::Shape(ShapeUnion u) : v_(std::move(u)) {
  if (std::get<ShapeUnion>(v_).parts.empty())
    fail(Errc::config_error, "union must have at least one part");
}

Shape Shape::sphere(const Vec3& center, double radius) {
  return Shape(Sphere{center, radius});
}
Shape Shape::box(const Vec3& lo, const Vec3& hi) { return Shape(AxisBox{lo, hi}); }
Shape Shape::unite(std::vector<Shape> parts) {
  return Shape(ShapeUnion{std::move(parts)});
}

double Shape::sdf(const Vec3& p) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) return sphere_sdf(s, p);
        else if constexpr (std::is_same_v<T, AxisBox>) return box_sdf(s, p);
        else {
          double d = std::numeric_limits<double>::max();
          for (const auto& part : s.parts) d = std::fmin(d, part.sdf(p));
          return d;
        }
      },
      v_);
}

Vec3 Shape::closest_boundary_point(const Vec3& p) const {
  return std::visit(
      [&](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) return sphere_closest(s, p);
        else if constexpr (std::is_same_v<T, AxisBox>) return box_closest(s, p);
        else {
          double best = std::numeric_limits<double>::max();
          Vec3 q = p;
          for (const auto& part : s.parts) {
            Vec3 cp = part.closest_boundary_point(p);
            double d = (cp - p).norm2();
            if (d < best) { best = d; q = cp; }
          }
          return q;
        }
      },
      v_);
}

double Shape::boundary_distance(const Vec3& p) const {
  return (closest_boundary_point(p) - p).norm();
}

std::pair<Vec3, Vec3> Shape::bounding_box() const {
  return std::visit(
      [&](const auto& s) -> std::pair<Vec3, Vec3> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          Vec3 r{s.radius, s.radius, s.radius};
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return {s.lo, s.hi};
        } else {
          auto [lo, hi] = s.parts.front().bounding_box();
          for (size_t i = 1; i < s.parts.size(); ++i) {
            auto [l, h] = s.parts[i].bounding_box();
            lo = cwise_min(lo, l);
            hi = cwise_max(hi, h);
          }
          return {lo, hi};
        }
      },
      v_);
}

bool Shape::sdf_exact_inside() const {
  if (const auto* u = std::get_if<ShapeUnion>(&v_)) {
    for (size_t i = 0; i < u->parts.size(); ++i)
      for (size_t j = i + 1; j < u->parts.size(); ++j)
        if (dist_sets(u->parts[i], u->parts[j]) <= 0.0) return false;
    return true;
  }
  return true;
}

std::vector<Vec3> Shape::boundary_samples(int count) const {
  std::vector<Vec3> out;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          // Fibonacci lattice.
          const double ga = M_PI * (3.0 - std::sqrt(5.0));
          out.reserve(count);
          for (int i = 0; i < count; ++i) {
            double zc = 1.0 - (2.0 * i + 1.0) / count;
            double r = std::sqrt(std::fmax(0.0, 1.0 - zc * zc));
            double phi = ga * i;
            out.push_back(s.center + Vec3{r * std::cos(phi), r * std::sin(phi), zc} * s.radius);
          }
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          int m = std::max(2, (int)std::ceil(std::sqrt(count / 6.0)));
          Vec3 ext = s.hi - s.lo;
          auto face = [&](int axis, double plane) {
            int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j) {
                double t1 = (i + 0.5) / m, t2 = (j + 0.5) / m;
                double c[3];
                c[axis] = plane;
                c[a1] = s.lo[a1] + t1 * ext[a1];
                c[a2] = s.lo[a2] + t2 * ext[a2];
                out.push_back({c[0], c[1], c[2]});
              }
          };
          for (int a = 0; a < 3; ++a) {
            face(a, a == 0 ? s.lo.x : (a == 1 ? s.lo.y : s.lo.z));
            face(a, a == 0 ? s.hi.x : (a == 1 ? s.hi.y : s.hi.z));
          }
        } else {
          for (const auto& part : s.parts) {
            auto sub = part.boundary_samples(count);
            out.insert(out.end(), sub.begin(), sub.end());
          }
        }
      },
      v_);
  return out;
}

namespace {

constexpr int kSampleCount = 64 * 64;

DistResult dist_numeric(const Shape& a, const Shape& b) {
  auto seeds = a.boundary_samples(kSampleCount);
  double best = std::numeric_limits<double>::max();
  Vec3 xa = seeds.front();
  for (const auto& p : seeds) {
    Vec3 q = b.closest_boundary_point(p);
    double d = (q - p).norm();
    if (d < best) { best = d; xa = p; }
  }
  // Alternating projections between the two boundaries.
  Vec3 x = xa;
  double prev = best;
  double delta = prev;
  for (int it = 0; it < 200; ++it) {
    Vec3 y = b.closest_boundary_point(x);
    x = a.closest_boundary_point(y);
    double d = (y - x).norm();
    delta = std::fabs(prev - d);
    prev = d;
    if (delta < 1e-14 * (1.0 + d)) break;
  }
  best = std::fmin(best, prev);
  auto [alo, ahi] = a.bounding_box();
  double scale = (ahi - alo).norm() + 1.0;
  double spacing = scale / std::sqrt((double)kSampleCount);
  return {best, std::fmin(spacing, delta + 1e-12 * scale)};
}

bool overlaps(const Shape& a, const Shape& b) {
  // Cheap overlap probe: any boundary sample of one inside the other.
  for (const auto& p : a.boundary_samples(512))
    if (b.sdf(p) < 0.0) return true;
  for (const auto& p : b.boundary_samples(512))
    if (a.sdf(p) < 0.0) return true;
  return false;
}

}  // namespace

DistResult dist_sets_detailed(const Shape& a, const Shape& b) {
  const auto* sa = std::get_if<Sphere>(&a.variant());
  const auto* sb = std::get_if<Sphere>(&b.variant());
  if (sa && sb) {
    double d = (sa->center - sb->center).norm() - sa->radius - sb->radius;
    return {std::fmax(0.0, d), 0.0};
  }
  if (overlaps(a, b)) return {0.0, 0.0};
  return dist_numeric(a, b);
}

double dist_sets(const Shape& a, const Shape& b) {
  return dist_sets_detailed(a, b).value;
}

double d_point(const Shape& a, const Vec3& p) {
  // Outside, the min-of-parts sdf is the exact set distance for every
  // supported variant; inside it is <= 0.
  return std::fmax(0.0, a.sdf(p));
}

DistResult broken_path_length_detailed(const Shape& b, const Shape& d,
                                       const Shape& omega) {
  auto cost = [&](const Vec3& y) {
    return b.boundary_distance(y) + omega.boundary_distance(y);
  };
  auto seeds = d.boundary_samples(kSampleCount);
  struct Start { double f; Vec3 y; };
  std::vector<Start> starts;
  starts.reserve(seeds.size());
  for (const auto& y : seeds) starts.push_back({cost(y), y});
  std::partial_sort(starts.begin(), starts.begin() + std::min<size_t>(8, starts.size()),
                    starts.end(), [](const Start& a, const Start& b) { return a.f < b.f; });

  auto [dlo, dhi] = d.bounding_box();
  double scale = (dhi - dlo).norm() + 1.0;
  double best = std::numeric_limits<double>::max();
  double last_step = scale;
  for (size_t s = 0; s < std::min<size_t>(8, starts.size()); ++s) {
    Vec3 y = starts[s].y;
    double f = starts[s].f;
    double step = 0.1 * scale;
    for (int it = 0; it < 400 && step > 1e-12 * scale; ++it) {
      // Numeric gradient of the path cost, then project back to the boundary.
      double eps = std::fmax(1e-7 * scale, 1e-10);
      Vec3 g{(cost(y + Vec3{eps, 0, 0}) - cost(y - Vec3{eps, 0, 0})) / (2 * eps),
             (cost(y + Vec3{0, eps, 0}) - cost(y - Vec3{0, eps, 0})) / (2 * eps),
             (cost(y + Vec3{0, 0, eps}) - cost(y - Vec3{0, 0, eps})) / (2 * eps)};
      Vec3 trial = d.closest_boundary_point(y - g * step);
      double ft = cost(trial);
      if (ft < f) {
        y = trial;
        f = ft;
        step *= 1.3;
      } else {
        step *= 0.5;
      }
    }
    if (f < best) { best = f; last_step = step; }
  }
  double spacing = scale / std::sqrt((double)kSampleCount);
  return {best, std::fmin(spacing, last_step + 1e-10 * scale)};
}

double broken_path_length(const Shape& b, const Shape& d, const Shape& omega) {
  return broken_path_length_detailed(b, d, omega).value;
}

double min_observation_time(const Shape& obstacle, const Shape& probe,
                            const Shape& surface) {
  return 2.0 * dist_sets(obstacle, probe) - dist_sets(surface, probe);
}

}  // namespace encl
