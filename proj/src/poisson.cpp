#include "mmreg/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mmreg {

namespace {
// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex fftw_planner_mutex;
}  // namespace

struct PoissonSolver::Plan {
  fftw_plan p = nullptr;
  std::size_t len = 0;
  ~Plan() {
    if (p) {
      std::lock_guard lock(fftw_planner_mutex);
      fftw_destroy_plan(p);
    }
  }
};

PoissonSolver::PoissonSolver(const Grid& grid) : grid_(grid) {
  const int nd = grid.ndim();
  if (nd == 0) throw std::invalid_argument("PoissonSolver: empty grid");
  int n[3];
  fftw_r2r_kind kinds[3];
  std::size_t len = 1;
  double norm = 1.0;
  for (int a = 0; a < nd; ++a) {
    interior_[a] = grid.dim(a) - 2;
    if (interior_[a] < 1)
      throw std::invalid_argument("PoissonSolver: grid has an empty interior");
    n[a] = interior_[a];
    kinds[a] = FFTW_RODFT00;
    len *= static_cast<std::size_t>(interior_[a]);
    axis_eig_[a].resize(interior_[a]);
    for (int k = 0; k < interior_[a]; ++k)
      axis_eig_[a][k] =
          2.0 * std::cos(std::numbers::pi * (k + 1) / (interior_[a] + 1)) - 2.0;
    norm *= 2.0 * (interior_[a] + 1);
  }
  inv_norm_ = 1.0 / norm;

  plan_ = std::make_unique<Plan>();
  plan_->len = len;
  std::vector<double> scratch(len, 0.0);
  std::lock_guard lock(fftw_planner_mutex);
  plan_->p = fftw_plan_r2r(nd, n, scratch.data(), scratch.data(), kinds,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan_->p) throw std::runtime_error("PoissonSolver: FFTW plan creation failed");
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

ScalarField PoissonSolver::solve(const ScalarField& rhs) const {
  if (rhs.grid != grid_)
    throw std::invalid_argument("PoissonSolver::solve: grid mismatch");
  const int nd = grid_.ndim();
  std::vector<double> buf(plan_->len);

  const int m0 = interior_[0], m1 = interior_[1], m2 = interior_[2];
  if (nd == 2) {
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j)
        buf[static_cast<std::size_t>(i) * m1 + j] = rhs.at(i + 1, j + 1);
  } else {
    std::size_t t = 0;
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j)
        for (int k = 0; k < m2; ++k, ++t) buf[t] = rhs.at(i + 1, j + 1, k + 1);
  }

  fftw_execute_r2r(plan_->p, buf.data(), buf.data());

  if (nd == 2) {
    std::size_t t = 0;
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j, ++t)
        buf[t] /= axis_eig_[0][i] + axis_eig_[1][j];
  } else {
    std::size_t t = 0;
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j)
        for (int k = 0; k < m2; ++k, ++t)
          buf[t] /= axis_eig_[0][i] + axis_eig_[1][j] + axis_eig_[2][k];
  }

  fftw_execute_r2r(plan_->p, buf.data(), buf.data());

  ScalarField u(grid_);
  if (nd == 2) {
    std::size_t t = 0;
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j, ++t) u.at(i + 1, j + 1) = buf[t] * inv_norm_;
  } else {
    std::size_t t = 0;
    for (int i = 0; i < m0; ++i)
      for (int j = 0; j < m1; ++j)
        for (int k = 0; k < m2; ++k, ++t) u.at(i + 1, j + 1, k + 1) = buf[t] * inv_norm_;
  }
  return u;
}

ScalarField PoissonSolver::apply(const ScalarField& u) {
  const Grid& g = u.grid;
  ScalarField out(g);
  if (g.ndim() == 2) {
    for (int i = 0; i < g.dim(0); ++i)
      for (int j = 0; j < g.dim(1); ++j) {
        if (g.on_boundary(i, j)) {
          out.at(i, j) = u.at(i, j);
        } else {
          out.at(i, j) = u.at(i - 1, j) + u.at(i + 1, j) + u.at(i, j - 1) +
                         u.at(i, j + 1) - 4.0 * u.at(i, j);
        }
      }
  } else {
    for (int i = 0; i < g.dim(0); ++i)
      for (int j = 0; j < g.dim(1); ++j)
        for (int k = 0; k < g.dim(2); ++k) {
          if (g.on_boundary(i, j, k)) {
            out.at(i, j, k) = u.at(i, j, k);
          } else {
            out.at(i, j, k) = u.at(i - 1, j, k) + u.at(i + 1, j, k) +
                              u.at(i, j - 1, k) + u.at(i, j + 1, k) +
                              u.at(i, j, k - 1) + u.at(i, j, k + 1) -
                              6.0 * u.at(i, j, k);
          }
        }
  }
  return out;
}

}  // namespace mmreg
