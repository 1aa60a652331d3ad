#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "mmreg/field.hpp"

namespace mmreg {

/// Bilinear/trilinear stencil at a continuous point. Out-of-domain
/// coordinates are clamped to the boundary before the stencil is built;
/// clamped axes carry zero weight derivative.
struct LinearStencil {
  int corners = 0;                          // 4 in 2D, 8 in 3D
  std::array<std::size_t, 8> index{};       // flat grid index per corner
  std::array<double, 8> weight{};
  std::array<std::array<double, 8>, 3> dweight{};  // dweight[axis][corner]

  double value(const std::vector<double>& f) const {
    double v = 0.0;
    for (int c = 0; c < corners; ++c) v += weight[c] * f[index[c]];
    return v;
  }
  /// d(value)/d(point[axis]).
  double point_derivative(const std::vector<double>& f, int axis) const {
    double v = 0.0;
    for (int c = 0; c < corners; ++c) v += dweight[axis][c] * f[index[c]];
    return v;
  }
  /// Scatters a cotangent onto the field entries the stencil reads.
  void scatter(double bar, std::vector<double>& f_bar) const {
    for (int c = 0; c < corners; ++c) f_bar[index[c]] += bar * weight[c];
  }
};

LinearStencil linear_stencil(const Grid& grid, const double* point);

/// Linear interpolation of a scalar field at a continuous pixel coordinate.
/// Throws on dimensionality mismatch.
double interp_linear(const ScalarField& field, std::span<const double> point);

}  // namespace mmreg
