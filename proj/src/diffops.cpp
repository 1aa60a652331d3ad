#include "mmreg/diffops.hpp"

#include <stdexcept>

namespace mmreg {

namespace {

// Visits every grid line along `axis`: calls fn(base_flat_index, stride, n).
template <typename Fn>
void for_each_line(const Grid& g, int axis, Fn&& fn) {
  const int nd = g.ndim();
  const std::size_t stride = g.stride(axis);
  const int n = g.dim(axis);
  const std::size_t count = g.size() / static_cast<std::size_t>(n);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t base = 0, rem = t;
    for (int a = nd - 1; a >= 0; --a) {
      if (a == axis) continue;
      base += (rem % static_cast<std::size_t>(g.dim(a))) * g.stride(a);
      rem /= static_cast<std::size_t>(g.dim(a));
    }
    fn(base, stride, n);
  }
}

}  // namespace

ScalarField axis_derivative(const ScalarField& f, int axis) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.ndim())
    throw std::invalid_argument("axis_derivative: axis out of range");
  ScalarField out(g);
  const auto& v = f.values;
  auto& d = out.values;
  for_each_line(g, axis, [&](std::size_t base, std::size_t s, int n) {
    d[base] = v[base + s] - v[base];
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t p = base + i * s;
      d[p] = 0.5 * (v[p + s] - v[p - s]);
    }
    const std::size_t last = base + (n - 1) * s;
    d[last] = v[last] - v[last - s];
  });
  return out;
}

ScalarField axis_derivative_adjoint(const ScalarField& cotangent, int axis) {
  const Grid& g = cotangent.grid;
  if (axis < 0 || axis >= g.ndim())
    throw std::invalid_argument("axis_derivative_adjoint: axis out of range");
  ScalarField out(g);
  const auto& c = cotangent.values;
  auto& d = out.values;
  for_each_line(g, axis, [&](std::size_t base, std::size_t s, int n) {
    // Scatter each output row's stencil back onto its inputs.
    d[base] -= c[base];
    d[base + s] += c[base];
    for (int i = 1; i < n - 1; ++i) {
      const std::size_t p = base + i * s;
      d[p + s] += 0.5 * c[p];
      d[p - s] -= 0.5 * c[p];
    }
    const std::size_t last = base + (n - 1) * s;
    d[last] += c[last];
    d[last - s] -= c[last];
  });
  return out;
}

VectorField gradient_central(const ScalarField& f) {
  VectorField grad(f.grid);
  for (int a = 0; a < f.grid.ndim(); ++a) grad[a] = axis_derivative(f, a);
  return grad;
}

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid);
  for (int a = 0; a < v.grid.ndim(); ++a) {
    ScalarField d = axis_derivative(v[a], a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  }
  return out;
}

ScalarField curl2d(const VectorField& v) {
  if (v.grid.ndim() != 2) throw std::invalid_argument("curl2d: grid must be 2D");
  ScalarField d10 = axis_derivative(v[1], 0);
  ScalarField d01 = axis_derivative(v[0], 1);
  ScalarField out(v.grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d10[i] - d01[i];
  return out;
}

VectorField curl3d(const VectorField& v) {
  if (v.grid.ndim() != 3) throw std::invalid_argument("curl3d: grid must be 3D");
  VectorField out(v.grid);
  ScalarField d21 = axis_derivative(v[2], 1), d12 = axis_derivative(v[1], 2);
  ScalarField d02 = axis_derivative(v[0], 2), d20 = axis_derivative(v[2], 0);
  ScalarField d10 = axis_derivative(v[1], 0), d01 = axis_derivative(v[0], 1);
  for (std::size_t i = 0; i < v.grid.size(); ++i) {
    out[0][i] = d21[i] - d12[i];
    out[1][i] = d02[i] - d20[i];
    out[2][i] = d10[i] - d01[i];
  }
  return out;
}

ScalarField jacobian_determinant(const DeformationField& phi) {
  const Grid& g = phi.grid;
  const int nd = g.ndim();
  const std::size_t n = g.size();
  // J[a][b] = d phi_a / d xi_b
  ScalarField comp(g);
  std::vector<ScalarField> partials;
  partials.reserve(nd * nd);
  for (int a = 0; a < nd; ++a) {
    std::copy(phi.targets.begin() + a * n, phi.targets.begin() + (a + 1) * n,
              comp.values.begin());
    for (int b = 0; b < nd; ++b) partials.push_back(axis_derivative(comp, b));
  }
  ScalarField det(g);
  if (nd == 2) {
    const auto& j00 = partials[0].values;
    const auto& j01 = partials[1].values;
    const auto& j10 = partials[2].values;
    const auto& j11 = partials[3].values;
    for (std::size_t i = 0; i < n; ++i) det[i] = j00[i] * j11[i] - j01[i] * j10[i];
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double a00 = partials[0][i], a01 = partials[1][i], a02 = partials[2][i];
      const double a10 = partials[3][i], a11 = partials[4][i], a12 = partials[5][i];
      const double a20 = partials[6][i], a21 = partials[7][i], a22 = partials[8][i];
      det[i] = a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
               a02 * (a10 * a21 - a11 * a20);
    }
  }
  return det;
}

}  // namespace mmreg
