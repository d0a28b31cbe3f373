#ifndef ENCL_SHAPE_HPP
#define ENCL_SHAPE_HPP

#include <utility>
#include <variant>
#include <vector>

#include "encl/vec3.hpp"

namespace encl {

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};

struct AxisBox {
  Vec3 lo;
  Vec3 hi;
};

class Shape;

struct ShapeUnion {
  std::vector<Shape> parts;
};

/// Solid region described by a signed distance function: negative inside,
/// positive outside, zero on the boundary. Sphere and AxisBox distances are
/// exact; a union takes the min of its parts, which is exact outside and on
/// the boundary for disjoint parts and conservative inside overlaps.
class Shape {
 public:
  using Variant = std::variant<Sphere, AxisBox, ShapeUnion>;

  explicit Shape(Sphere s);
  explicit Shape(AxisBox b);
  explicit Shape(ShapeUnion u);

  static Shape sphere(const Vec3& center, double radius);
  static Shape box(const Vec3& lo, const Vec3& hi);
  static Shape unite(std::vector<Shape> parts);

  double sdf(const Vec3& p) const;

  /// Nearest point of the shape's boundary. For a union this is the nearest
  /// part boundary, which coincides with the union boundary when parts are
  /// disjoint.
  Vec3 closest_boundary_point(const Vec3& p) const;

  /// Distance from p to the boundary (not the solid): |p - closest point|.
  double boundary_distance(const Vec3& p) const;

  std::pair<Vec3, Vec3> bounding_box() const;

  /// False when the sdf may overestimate depth (union with overlapping
  /// parts).
  bool sdf_exact_inside() const;

  /// Roughly uniform boundary point cloud used to seed numeric distance
  /// searches; count is a lower bound per primitive.
  std::vector<Vec3> boundary_samples(int count) const;

  const Variant& variant() const { return v_; }
  bool is_sphere() const { return std::holds_alternative<Sphere>(v_); }
  bool is_box() const { return std::holds_alternative<AxisBox>(v_); }

 private:
  Variant v_;
};

struct DistResult {
  double value = 0.0;
  double error_bound = 0.0;
};

/// inf |x - y| over x in A, y in B (sets, not boundaries). Overlapping sets
/// give 0. Sphere pairs use the closed form; anything else is minimized
/// numerically from boundary-sample starts with alternating projections.
double dist_sets(const Shape& a, const Shape& b);
DistResult dist_sets_detailed(const Shape& a, const Shape& b);

/// Distance from a point to the solid shape (0 inside).
double d_point(const Shape& a, const Vec3& p);

/// Minimum of |x-y| + |y-z| over x on the boundary of b, y on the boundary
/// of d, z on the boundary of omega.
double broken_path_length(const Shape& b, const Shape& d, const Shape& omega);
DistResult broken_path_length_detailed(const Shape& b, const Shape& d,
                                       const Shape& omega);

/// 2 dist(D,B) - dist(Omega,B); observation windows must exceed this.
double min_observation_time(const Shape& obstacle, const Shape& probe,
                            const Shape& surface);

}  // namespace encl

#endif
