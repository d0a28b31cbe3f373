#ifndef ENCL_FIELDS_HPP
#define ENCL_FIELDS_HPP

#include <optional>

#include "encl/grid.hpp"
#include "encl/shape.hpp"

namespace encl {

/// Label cells: Solid where the obstacle sdf is negative at the cell center,
/// Sponge on the outer absorbing shell, Fluid elsewhere. Throws
/// underresolved_obstacle when the obstacle spans fewer than 6 cells on some
/// axis.
CellMask rasterize_mask(const Grid3& grid, const std::optional<Shape>& obstacle,
                        int sponge_cells);

/// Wave coefficient map: contrast inside the obstacle, 1 outside. Face
/// values are derived later by harmonic means. Throws non_positive_contrast.
ScalarField3 build_material(const Grid3& grid, const Shape& obstacle,
                            double contrast);

/// Fraction of each cell covered by the ball, from a linear model of the
/// signed distance at the cell center; exact 0/1 away from the boundary.
double cell_cover_fraction(double sdf, double h);

/// Trilinear interpolation of cell-centered values; throws out_of_bounds
/// when the 8 surrounding cell centers do not exist.
double sample_trilinear(const ScalarField3& field, const Vec3& p);

bool trilinear_in_range(const Grid3& grid, const Vec3& p);

}  // namespace encl

#endif
