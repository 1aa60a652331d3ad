#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace mmreg {

/// Discrete rectangular domain with 2 or 3 axes. All math in this library
/// runs in pixel units; per-axis physical spacing (mm) is consulted only
/// when reporting physical distances.
class Grid {
 public:
  Grid() = default;

  Grid(int n0, int n1, double s0 = 1.0, double s1 = 1.0)
      : ndim_(2), dims_{n0, n1, 1}, spacing_{s0, s1, 1.0} {
    validate();
  }

  Grid(int n0, int n1, int n2, double s0 = 1.0, double s1 = 1.0, double s2 = 1.0)
      : ndim_(3), dims_{n0, n1, n2}, spacing_{s0, s1, s2} {
    validate();
  }

  int ndim() const { return ndim_; }
  int dim(int axis) const { return dims_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }

  /// |Omega|: number of grid points.
  std::size_t size() const {
    std::size_t n = 1;
    for (int a = 0; a < ndim_; ++a) n *= static_cast<std::size_t>(dims_[a]);
    return n;
  }

  /// Row-major strides, last axis fastest.
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = ndim_ - 1; a > axis; --a) s *= static_cast<std::size_t>(dims_[a]);
    return s;
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * dims_[1] + j;
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
  }

  bool operator==(const Grid& o) const {
    if (ndim_ != o.ndim_) return false;
    for (int a = 0; a < ndim_; ++a)
      if (dims_[a] != o.dims_[a] || spacing_[a] != o.spacing_[a]) return false;
    return true;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  /// True for points on any face of the domain.
  bool on_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == dims_[0] - 1 || j == dims_[1] - 1;
  }
  bool on_boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == dims_[0] - 1 || j == dims_[1] - 1 ||
           k == dims_[2] - 1;
  }

 private:
  void validate() const {
    for (int a = 0; a < ndim_; ++a) {
      if (dims_[a] < 4)
        throw std::invalid_argument("Grid: every axis needs at least 4 samples");
      if (!(spacing_[a] > 0.0))
        throw std::invalid_argument("Grid: spacing must be positive");
    }
  }

  int ndim_ = 0;
  std::array<int, 3> dims_{0, 0, 0};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
};

}  // namespace mmreg
