#include "encl/surface.hpp"

#include <cmath>
#include <variant>

#include "encl/errors.hpp"

namespace encl {

SurfacePatchSet make_surface_patches(const Shape& surface, const Grid3& grid,
                                     int resolution) {
  if (resolution < 4)
    fail(Errc::config_error, "surface resolution must be at least 4");
  SurfacePatchSet set;
  set.offset_delta = grid.h;
  const double delta = grid.h;

  auto push = [&](const Vec3& pos, const Vec3& n, double w) {
    set.nodes.push_back({pos, n, w, pos - n * delta, pos + n * delta});
  };

  if (const auto* s = std::get_if<Sphere>(&surface.variant())) {
    const int nu = resolution;      // bands in cos(theta)
    const int nphi = 2 * resolution;
    const double r = s->radius;
    const double w = r * r * (2.0 / nu) * (2.0 * M_PI / nphi);
    for (int iu = 0; iu < nu; ++iu) {
      double u = -1.0 + (iu + 0.5) * 2.0 / nu;
      double st = std::sqrt(std::fmax(0.0, 1.0 - u * u));
      for (int ip = 0; ip < nphi; ++ip) {
        double phi = (ip + 0.5) * 2.0 * M_PI / nphi;
        Vec3 n{st * std::cos(phi), st * std::sin(phi), u};
        push(s->center + n * r, n, w);
      }
    }
    return set;
  }

  if (const auto* b = std::get_if<AxisBox>(&surface.variant())) {
    const int m = resolution;
    Vec3 ext = b->hi - b->lo;
    auto face = [&](int axis, double plane, double sign) {
      int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
      double area = ext[a1] * ext[a2];
      double w = area / (m * m);
      double nvec[3] = {0, 0, 0};
      nvec[axis] = sign;
      const double lo[3] = {b->lo.x, b->lo.y, b->lo.z};
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double c[3];
          c[axis] = plane;
          c[a1] = lo[a1] + (i + 0.5) / m * ext[a1];
          c[a2] = lo[a2] + (j + 0.5) / m * ext[a2];
          push({c[0], c[1], c[2]}, {nvec[0], nvec[1], nvec[2]}, w);
        }
    };
    face(0, b->lo.x, -1.0);
    face(0, b->hi.x, +1.0);
    face(1, b->lo.y, -1.0);
    face(1, b->hi.y, +1.0);
    face(2, b->lo.z, -1.0);
    face(2, b->hi.z, +1.0);
    return set;
  }

  fail(Errc::unsupported_surface_shape,
       "recording surface must be a sphere or an axis box");
}

}  // namespace encl
