#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mmreg/grid.hpp"

namespace mmreg {

/// Real-valued samples on a Grid, one value per grid point, row-major.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}
  ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("ScalarField: value count does not match grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double& at(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double at(int i, int j, int k) const { return values[grid.index(i, j, k)]; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Images are scalar fields; the alias marks intent at interfaces.
using Image = ScalarField;

/// One scalar component per axis, all sharing the same grid.
struct VectorField {
  Grid grid;
  std::vector<ScalarField> comps;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    comps.reserve(g.ndim());
    for (int a = 0; a < g.ndim(); ++a) comps.emplace_back(g);
  }

  ScalarField& operator[](int a) { return comps[a]; }
  const ScalarField& operator[](int a) const { return comps[a]; }
};

/// Transform phi as a per-grid-point target coordinate in continuous pixel
/// units. Targets are stored axis-major: component a of point idx lives at
/// targets[a * grid.size() + idx].
struct DeformationField {
  Grid grid;
  std::vector<double> targets;

  DeformationField() = default;
  explicit DeformationField(const Grid& g)
      : grid(g), targets(static_cast<std::size_t>(g.ndim()) * g.size(), 0.0) {}

  double& target(int axis, std::size_t idx) { return targets[axis * grid.size() + idx]; }
  double target(int axis, std::size_t idx) const {
    return targets[axis * grid.size() + idx];
  }

  static DeformationField identity(const Grid& g);
};

/// Non-negative integer labels on a Grid; label values are < label_count.
struct Mask {
  Grid grid;
  std::vector<std::uint16_t> labels;
  int label_count = 0;

  Mask() = default;
  Mask(const Grid& g, int count) : grid(g), labels(g.size(), 0), label_count(count) {}
  Mask(const Grid& g, std::vector<std::uint16_t> l, int count)
      : grid(g), labels(std::move(l)), label_count(count) {
    if (labels.size() != grid.size())
      throw std::invalid_argument("Mask: label count does not match grid");
    for (auto v : labels)
      if (v >= label_count) throw std::invalid_argument("Mask: label out of range");
  }

  std::size_t size() const { return labels.size(); }
};

}  // namespace mmreg
