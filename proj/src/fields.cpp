#include "encl/fields.hpp"

#include <algorithm>
#include <cmath>

#include "encl/errors.hpp"

namespace encl {

Grid3 Grid3::from_bounds(const Vec3& lo, const Vec3& hi, double h) {
  if (h <= 0.0) fail(Errc::config_error, "grid spacing must be positive");
  Grid3 g;
  g.h = h;
  g.origin = lo;
  g.nx = std::max(8, (int)std::ceil((hi.x - lo.x) / h - 1e-9));
  g.ny = std::max(8, (int)std::ceil((hi.y - lo.y) / h - 1e-9));
  g.nz = std::max(8, (int)std::ceil((hi.z - lo.z) / h - 1e-9));
  return g;
}

bool ScalarField3::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double ScalarField3::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::fmax(m, std::fabs(v));
  return m;
}

CellMask rasterize_mask(const Grid3& grid, const std::optional<Shape>& obstacle,
                        int sponge_cells) {
  if (sponge_cells < 0 || 2 * sponge_cells >= std::min({grid.nx, grid.ny, grid.nz}))
    fail(Errc::config_error, "sponge shell thicker than the grid");
  if (obstacle) {
    auto [lo, hi] = obstacle->bounding_box();
    Vec3 span = hi - lo;
    double min_span = std::min({span.x, span.y, span.z});
    if (min_span < 6.0 * grid.h)
      fail(Errc::underresolved_obstacle,
           "obstacle spans fewer than 6 cells on some axis");
  }

  CellMask mask;
  mask.grid = grid;
  mask.labels.assign(grid.size(), (std::uint8_t)CellLabel::Fluid);
  const int t = sponge_cells;
  for (int k = 0; k < grid.nz; ++k) {
    bool kz = k < t || k >= grid.nz - t;
    for (int j = 0; j < grid.ny; ++j) {
      bool jz = j < t || j >= grid.ny - t;
      for (int i = 0; i < grid.nx; ++i) {
        std::uint8_t lab = (std::uint8_t)CellLabel::Fluid;
        if (obstacle && obstacle->sdf(grid.center(i, j, k)) < 0.0) {
          lab = (std::uint8_t)CellLabel::Solid;
          ++mask.solid_count;
        } else if (kz || jz || i < t || i >= grid.nx - t) {
          lab = (std::uint8_t)CellLabel::Sponge;
          ++mask.sponge_count;
        }
        mask.labels[grid.idx(i, j, k)] = lab;
      }
    }
  }
  return mask;
}

ScalarField3 build_material(const Grid3& grid, const Shape& obstacle,
                            double contrast) {
  if (contrast <= 0.0)
    fail(Errc::non_positive_contrast, "material contrast must be positive");
  ScalarField3 gamma(grid, 1.0);
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        if (obstacle.sdf(grid.center(i, j, k)) < 0.0)
          gamma.at(i, j, k) = contrast;
  return gamma;
}

double cell_cover_fraction(double sdf, double h) {
  return std::clamp(0.5 - sdf / h, 0.0, 1.0);
}

bool trilinear_in_range(const Grid3& grid, const Vec3& p) {
  Vec3 f = (p - grid.origin) / grid.h - Vec3{0.5, 0.5, 0.5};
  return f.x >= 0.0 && f.y >= 0.0 && f.z >= 0.0 && f.x <= grid.nx - 1.0 &&
         f.y <= grid.ny - 1.0 && f.z <= grid.nz - 1.0;
}

double sample_trilinear(const ScalarField3& field, const Vec3& p) {
  const Grid3& g = field.grid;
  double fx = (p.x - g.origin.x) / g.h - 0.5;
  double fy = (p.y - g.origin.y) / g.h - 0.5;
  double fz = (p.z - g.origin.z) / g.h - 0.5;
  int i0 = (int)std::floor(fx), j0 = (int)std::floor(fy), k0 = (int)std::floor(fz);
  if (i0 < 0 || j0 < 0 || k0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny || k0 + 1 >= g.nz) {
    // Points exactly on the last cell center are still valid.
    if (fx == (double)(g.nx - 1)) i0 = g.nx - 2;
    if (fy == (double)(g.ny - 1)) j0 = g.ny - 2;
    if (fz == (double)(g.nz - 1)) k0 = g.nz - 2;
    if (i0 < 0 || j0 < 0 || k0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny || k0 + 1 >= g.nz)
      fail(Errc::out_of_bounds, "trilinear sample outside the cell-center hull");
  }
  double tx = fx - i0, ty = fy - j0, tz = fz - k0;
  auto v = [&](int di, int dj, int dk) {
    return field.values[g.idx(i0 + di, j0 + dj, k0 + dk)];
  };
  double c00 = v(0, 0, 0) * (1 - tx) + v(1, 0, 0) * tx;
  double c10 = v(0, 1, 0) * (1 - tx) + v(1, 1, 0) * tx;
  double c01 = v(0, 0, 1) * (1 - tx) + v(1, 0, 1) * tx;
  double c11 = v(0, 1, 1) * (1 - tx) + v(1, 1, 1) * tx;
  double c0 = c00 * (1 - ty) + c10 * ty;
  double c1 = c01 * (1 - ty) + c11 * ty;
  return c0 * (1 - tz) + c1 * tz;
}

}  // namespace encl
