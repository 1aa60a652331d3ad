#pragma once

#include <array>
#include <memory>
#include <vector>

#include "mmreg/field.hpp"

namespace mmreg {

/// Exact solver for the discrete Poisson equation Lu = F with the 5-point
/// (2D) / 7-point (3D) unit-spacing Laplacian and homogeneous Dirichlet
/// boundary: u = 0 on every boundary node, (Lu) = F at every interior node.
///
/// Diagonalized by the type-I discrete sine transform; per-axis eigenvalues
/// are 2cos(pi k/(n+1)) - 2 for interior size n. The operator is symmetric,
/// so solve() is its own adjoint on the interior.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid& grid);
  ~PoissonSolver();

  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  const Grid& grid() const { return grid_; }

  /// Boundary values of the result are exactly zero; only interior values
  /// of rhs are read.
  ScalarField solve(const ScalarField& rhs) const;

  /// Applies the discrete Laplacian stencil at interior points; boundary
  /// rows pass u through unchanged.
  static ScalarField apply(const ScalarField& u);

 private:
  Grid grid_;
  std::array<int, 3> interior_{1, 1, 1};
  std::array<std::vector<double>, 3> axis_eig_;
  double inv_norm_ = 1.0;  // 1 / prod(2(n_a+1)) for the round-trip DST

  struct Plan;
  std::unique_ptr<Plan> plan_;
};

}  // namespace mmreg
