#ifndef ENCL_GRID_HPP
#define ENCL_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "encl/vec3.hpp"

namespace encl {

/// Uniform cell-centered Cartesian grid; cell (i,j,k) is centered at
/// origin + h*(i+1/2, j+1/2, k+1/2). Linear index runs x-fastest.
struct Grid3 {
  Vec3 origin;
  double h = 1.0;
  int nx = 0, ny = 0, nz = 0;

  std::size_t size() const {
    return (std::size_t)nx * (std::size_t)ny * (std::size_t)nz;
  }
  std::size_t idx(int i, int j, int k) const {
    return (std::size_t)i + (std::size_t)nx * ((std::size_t)j + (std::size_t)ny * (std::size_t)k);
  }
  Vec3 center(int i, int j, int k) const {
    return origin + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
  }
  Vec3 lo() const { return origin; }
  Vec3 hi() const { return origin + Vec3{nx * h, ny * h, nz * h}; }

  /// Smallest grid with the given spacing whose cell block covers [lo,hi].
  static Grid3 from_bounds(const Vec3& lo, const Vec3& hi, double h);
};

struct ScalarField3 {
  Grid3 grid;
  std::vector<double> values;

  ScalarField3() = default;
  explicit ScalarField3(const Grid3& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& at(int i, int j, int k) { return values[grid.idx(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.idx(i, j, k)]; }
  bool all_finite() const;
  double max_abs() const;
};

enum class CellLabel : std::uint8_t { Fluid = 0, Solid = 1, Sponge = 2 };

struct CellMask {
  Grid3 grid;
  std::vector<std::uint8_t> labels;
  std::size_t solid_count = 0;
  std::size_t sponge_count = 0;

  CellLabel at(int i, int j, int k) const {
    return CellLabel(labels[grid.idx(i, j, k)]);
  }
};

}  // namespace encl

#endif
