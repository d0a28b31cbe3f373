#ifndef ENCL_SURFACE_HPP
#define ENCL_SURFACE_HPP

#include <vector>

#include "encl/grid.hpp"
#include "encl/shape.hpp"

namespace encl {

struct SurfaceNode {
  Vec3 position;
  Vec3 normal;       // unit, outward
  double weight;     // area element
  Vec3 inner_offset; // position - delta * normal
  Vec3 outer_offset; // position + delta * normal
};

/// Quadrature nodes on the recording surface with paired normal offsets for
/// centered normal derivatives.
struct SurfacePatchSet {
  std::vector<SurfaceNode> nodes;
  double offset_delta = 0.0;

  double total_weight() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
  }
};

/// Sphere surfaces use a midpoint rule in cos(theta) times a uniform
/// azimuthal rule (weights sum exactly to the sphere area); boxes get an
/// m-by-m midpoint grid per face. The normal-derivative offset delta equals
/// the grid spacing. Throws unsupported_surface_shape for other variants.
SurfacePatchSet make_surface_patches(const Shape& surface, const Grid3& grid,
                                     int resolution);

}  // namespace encl

#endif
