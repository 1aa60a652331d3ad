#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "mmreg/diffops.hpp"
#include "mmreg/field.hpp"
#include "mmreg/grid.hpp"
#include "mmreg/interp.hpp"
#include "mmreg/warp.hpp"

using namespace mmreg;

namespace {

ScalarField random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0,
                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

// Reference one-axis stencil: central interior, one-sided ends.
double stencil_oracle(const std::vector<double>& line, std::size_t i) {
  if (i == 0) return line[1] - line[0];
  if (i + 1 == line.size()) return line[i] - line[i - 1];
  return 0.5 * (line[i + 1] - line[i - 1]);
}

}  // namespace

TEST_CASE("grid rejects undersized axes and zero spacing") {
  CHECK_THROWS_AS(Grid(3, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 3), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 8, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 8, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8, 8, -1.0, 1.0), std::invalid_argument);
  CHECK_NOTHROW(Grid(4, 4));
  CHECK_NOTHROW(Grid(4, 4, 4));
}

TEST_CASE("grid indexing is row-major with the last axis fastest") {
  Grid g2(5, 7);
  CHECK(g2.size() == 35);
  CHECK(g2.index(0, 0) == 0);
  CHECK(g2.index(0, 1) == 1);
  CHECK(g2.index(1, 0) == 7);
  CHECK(g2.index(4, 6) == 34);

  Grid g3(4, 5, 6);
  CHECK(g3.size() == 120);
  CHECK(g3.index(0, 0, 1) == 1);
  CHECK(g3.index(0, 1, 0) == 6);
  CHECK(g3.index(1, 0, 0) == 30);
}

TEST_CASE("grid boundary classification") {
  Grid g(5, 5);
  CHECK(g.on_boundary(0, 2));
  CHECK(g.on_boundary(4, 2));
  CHECK(g.on_boundary(2, 0));
  CHECK(!g.on_boundary(2, 2));
  Grid g3(4, 4, 4);
  CHECK(g3.on_boundary(0, 1, 1));
  CHECK(!g3.on_boundary(1, 2, 2));
}

TEST_CASE("scalar field construction validates value count") {
  Grid g(4, 4);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(15, 0.0)), std::invalid_argument);
  ScalarField f(g, 2.5);
  CHECK(f[0] == 2.5);
  CHECK(f.all_finite());
  f[3] = std::nan("");
  CHECK(!f.all_finite());
}

TEST_CASE("interpolation returns the stored value at a grid point") {
  Grid g(6, 8);
  ScalarField f(g);
  f.at(3, 4) = 7.0;
  const double p[2] = {3.0, 4.0};
  CHECK(interp_linear(f, {p, 2}) == 7.0);
}

TEST_CASE("interpolation is exact at every grid point") {
  std::mt19937_64 rng(11);
  Grid g(7, 5);
  ScalarField f = random_field(g, rng);
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j) {
      const double p[2] = {double(i), double(j)};
      CHECK(interp_linear(f, {p, 2}) == f.at(i, j));
    }

  Grid g3(4, 5, 6);
  ScalarField f3 = random_field(g3, rng);
  for (int i = 0; i < g3.dim(0); ++i)
    for (int j = 0; j < g3.dim(1); ++j)
      for (int k = 0; k < g3.dim(2); ++k) {
        const double p[3] = {double(i), double(j), double(k)};
        CHECK(interp_linear(f3, {p, 3}) == f3.at(i, j, k));
      }
}

TEST_CASE("interpolation halves a unit step at the midpoint") {
  Grid g(4, 4);
  ScalarField f(g);
  for (int j = 0; j < 4; ++j) f.at(2, j) = 1.0;  // step along axis 0
  const double p[2] = {1.5, 2.0};
  CHECK(interp_linear(f, {p, 2}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("out-of-domain queries clamp to the boundary") {
  std::mt19937_64 rng(12);
  Grid g(5, 5);
  ScalarField f = random_field(g, rng);
  const double p1[2] = {-2.5, 0.0};
  CHECK(interp_linear(f, {p1, 2}) == f.at(0, 0));
  const double p2[2] = {9.0, 4.7};
  CHECK(interp_linear(f, {p2, 2}) == doctest::Approx(f.at(4, 4)).epsilon(1e-15));
}

TEST_CASE("interpolation rejects mismatched dimensionality") {
  Grid g(5, 5);
  ScalarField f(g);
  const double p[3] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(interp_linear(f, {p, 3}), std::invalid_argument);
}

TEST_CASE("interpolated value is a convex combination of corner values") {
  std::mt19937_64 rng(13);
  Grid g(6, 6);
  ScalarField f = random_field(g, rng, 0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const double p[2] = {u(rng), u(rng)};
    const double v = interp_linear(f, {p, 2});
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("gradient of a constant field vanishes") {
  Grid g(6, 6);
  ScalarField f(g, 3.7);
  VectorField grad = gradient_central(f);
  for (int a = 0; a < 2; ++a)
    for (double v : grad[a].values) CHECK(v == 0.0);
}

TEST_CASE("gradient of a linear ramp is the slope") {
  Grid g(6, 6);
  ScalarField f(g);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) f.at(i, j) = 2.0 * i;
  VectorField grad = gradient_central(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(grad[0][i] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(grad[1][i] == 0.0);
  }
}

TEST_CASE("gradient of a quadratic matches the analytic interior derivative") {
  Grid g(8, 8);
  ScalarField f(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) f.at(i, j) = double(i) * i;
  VectorField grad = gradient_central(f);
  for (int i = 1; i < 7; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(grad[0].at(i, j) == doctest::Approx(2.0 * i).epsilon(1e-14));
  // Boundary uses the first-order one-sided stencil.
  for (int j = 0; j < 8; ++j) {
    CHECK(grad[0].at(0, j) == doctest::Approx(1.0).epsilon(1e-15));   // 1-0
    CHECK(grad[0].at(7, j) == doctest::Approx(13.0).epsilon(1e-15));  // 49-36
  }
}

TEST_CASE("axis derivative matches a brute-force stencil oracle") {
  std::mt19937_64 rng(14);
  Grid g(12, 12);
  ScalarField f = random_field(g, rng);
  for (int axis = 0; axis < 2; ++axis) {
    ScalarField d = axis_derivative(f, axis);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        std::vector<double> line(12);
        for (int t = 0; t < 12; ++t)
          line[t] = axis == 0 ? f.at(t, j) : f.at(i, t);
        const std::size_t pos = axis == 0 ? i : j;
        CHECK(d.at(i, j) == doctest::Approx(stencil_oracle(line, pos)).epsilon(1e-15));
      }
  }
}

TEST_CASE("axis derivative adjoint satisfies the transpose identity") {
  std::mt19937_64 rng(15);
  for (const Grid& g : {Grid(9, 7), Grid(5, 6, 7)}) {
    for (int axis = 0; axis < g.ndim(); ++axis) {
      ScalarField x = random_field(g, rng);
      ScalarField y = random_field(g, rng);
      const ScalarField Dx = axis_derivative(x, axis);
      const ScalarField Dty = axis_derivative_adjoint(y, axis);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        lhs += Dx[i] * y[i];
        rhs += x[i] * Dty[i];
      }
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient is linear in the field") {
  std::mt19937_64 rng(16);
  Grid g(7, 9);
  ScalarField f = random_field(g, rng);
  ScalarField h = random_field(g, rng);
  const double a = 1.7, b = -0.4;
  ScalarField combo(g);
  for (std::size_t i = 0; i < g.size(); ++i) combo[i] = a * f[i] + b * h[i];
  VectorField gc = gradient_central(combo);
  VectorField gf = gradient_central(f);
  VectorField gh = gradient_central(h);
  for (int ax = 0; ax < 2; ++ax)
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(gc[ax][i] == doctest::Approx(a * gf[ax][i] + b * gh[ax][i]).epsilon(1e-13));
}

TEST_CASE("divergence and curl of the radial field") {
  Grid g(8, 8);
  VectorField v(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      v[0].at(i, j) = i;  // (x, y)
      v[1].at(i, j) = j;
    }
  ScalarField div = divergence(v);
  ScalarField curl = curl2d(v);
  for (int i = 1; i < 7; ++i)
    for (int j = 1; j < 7; ++j) {
      CHECK(div.at(i, j) == doctest::Approx(2.0).epsilon(1e-15));
      CHECK(curl.at(i, j) == 0.0);
    }
}

TEST_CASE("divergence and curl of a rigid rotation") {
  Grid g(8, 8);
  VectorField v(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      v[0].at(i, j) = -j;  // (-y, x)
      v[1].at(i, j) = i;
    }
  ScalarField div = divergence(v);
  ScalarField curl = curl2d(v);
  for (int i = 1; i < 7; ++i)
    for (int j = 1; j < 7; ++j) {
      CHECK(div.at(i, j) == 0.0);
      CHECK(curl.at(i, j) == doctest::Approx(2.0).epsilon(1e-15));
    }
}

TEST_CASE("divergence and curl match the stencil oracle on random fields") {
  std::mt19937_64 rng(17);
  Grid g(12, 12);
  VectorField v(g);
  v[0] = random_field(g, rng);
  v[1] = random_field(g, rng);
  const ScalarField d0 = axis_derivative(v[0], 0);
  const ScalarField d1 = axis_derivative(v[1], 1);
  const ScalarField c0 = axis_derivative(v[1], 0);
  const ScalarField c1 = axis_derivative(v[0], 1);
  ScalarField div = divergence(v);
  ScalarField curl = curl2d(v);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(div[i] == doctest::Approx(d0[i] + d1[i]).epsilon(1e-15));
    CHECK(curl[i] == doctest::Approx(c0[i] - c1[i]).epsilon(1e-15));
  }
}

TEST_CASE("3d curl of a rigid rotation about the last axis") {
  Grid g(6, 6, 6);
  VectorField v(g);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) {
        v[0].at(i, j, k) = -j;
        v[1].at(i, j, k) = i;
        v[2].at(i, j, k) = 0.0;
      }
  VectorField c = curl3d(v);
  for (int i = 1; i < 5; ++i)
    for (int j = 1; j < 5; ++j)
      for (int k = 1; k < 5; ++k) {
        CHECK(c[0].at(i, j, k) == 0.0);
        CHECK(c[1].at(i, j, k) == 0.0);
        CHECK(c[2].at(i, j, k) == doctest::Approx(2.0).epsilon(1e-15));
      }
}

TEST_CASE("3d curl matches per-component stencil recomposition") {
  std::mt19937_64 rng(18);
  Grid g(6, 7, 8);
  VectorField v(g);
  for (int a = 0; a < 3; ++a) v[a] = random_field(g, rng);
  VectorField c = curl3d(v);
  const ScalarField d12 = axis_derivative(v[2], 1);
  const ScalarField d21 = axis_derivative(v[1], 2);
  const ScalarField d20 = axis_derivative(v[0], 2);
  const ScalarField d02 = axis_derivative(v[2], 0);
  const ScalarField d01 = axis_derivative(v[1], 0);
  const ScalarField d10 = axis_derivative(v[0], 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(c[0][i] == doctest::Approx(d12[i] - d21[i]).epsilon(1e-15));
    CHECK(c[1][i] == doctest::Approx(d20[i] - d02[i]).epsilon(1e-15));
    CHECK(c[2][i] == doctest::Approx(d01[i] - d10[i]).epsilon(1e-15));
  }
}

TEST_CASE("jacobian determinant of the identity is one everywhere") {
  for (const Grid& g : {Grid(9, 7), Grid(5, 6, 7)}) {
    ScalarField det = jacobian_determinant(DeformationField::identity(g));
    for (double v : det.values) CHECK(v == 1.0);
  }
}

TEST_CASE("jacobian determinant of a uniform scaling") {
  Grid g(10, 10);
  DeformationField phi = DeformationField::identity(g);
  for (auto& t : phi.targets) t *= 1.2;
  ScalarField det = jacobian_determinant(phi);
  for (double v : det.values) CHECK(v == doctest::Approx(1.44).epsilon(1e-13));
}

TEST_CASE("interior jacobian determinant of an affine map equals det(A)") {
  Grid g(12, 12);
  const double A[2][2] = {{1.1, 0.3}, {-0.2, 0.9}};
  const double b[2] = {0.5, -0.25};
  DeformationField phi(g);
  const std::size_t n = g.size();
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const std::size_t idx = g.index(i, j);
      phi.targets[0 * n + idx] = A[0][0] * i + A[0][1] * j + b[0];
      phi.targets[1 * n + idx] = A[1][0] * i + A[1][1] * j + b[1];
    }
  const double expected = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  ScalarField det = jacobian_determinant(phi);
  for (double v : det.values) CHECK(v == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("jacobian determinant matches an explicit per-point 2x2 oracle") {
  std::mt19937_64 rng(19);
  Grid g(16, 16);
  DeformationField phi = DeformationField::identity(g);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto& t : phi.targets) t += u(rng);
  ScalarField det = jacobian_determinant(phi);

  const std::size_t n = g.size();
  auto comp = [&](int a, int i, int j) { return phi.targets[a * n + g.index(i, j)]; };
  auto d = [&](int a, int axis, int i, int j) {
    if (axis == 0) {
      if (i == 0) return comp(a, 1, j) - comp(a, 0, j);
      if (i == 15) return comp(a, 15, j) - comp(a, 14, j);
      return 0.5 * (comp(a, i + 1, j) - comp(a, i - 1, j));
    }
    if (j == 0) return comp(a, i, 1) - comp(a, i, 0);
    if (j == 15) return comp(a, i, 15) - comp(a, i, 14);
    return 0.5 * (comp(a, i, j + 1) - comp(a, i, j - 1));
  };
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double oracle =
          d(0, 0, i, j) * d(1, 1, i, j) - d(0, 1, i, j) * d(1, 0, i, j);
      CHECK(det.at(i, j) == doctest::Approx(oracle).epsilon(1e-14));
    }
}

TEST_CASE("warping by the identity is a bitwise no-op") {
  std::mt19937_64 rng(20);
  Grid g(9, 9);
  Image img = random_field(g, rng);
  Image out = warp_image(img, DeformationField::identity(g));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(out[i] == img[i]);
}

TEST_CASE("warping by a unit shift samples the shifted pixel with clamping") {
  std::mt19937_64 rng(21);
  Grid g(8, 8);
  Image img = random_field(g, rng);
  DeformationField phi = DeformationField::identity(g);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) phi.targets[0 * n + i] += 1.0;
  Image out = warp_image(img, phi);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(out.at(i, j) == img.at(std::min(i + 1, 7), j));
}

TEST_CASE("warping matches a per-pixel interpolation oracle") {
  std::mt19937_64 rng(22);
  Grid g(10, 10);
  Image img = random_field(g, rng);
  DeformationField phi = DeformationField::identity(g);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (auto& t : phi.targets) t += u(rng);
  Image out = warp_image(img, phi);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p[2] = {phi.targets[i], phi.targets[n + i]};
    CHECK(out[i] == doctest::Approx(interp_linear(img, {p, 2})).epsilon(1e-15));
  }
}

TEST_CASE("warping rejects mismatched grids") {
  Image img{Grid(8, 8)};
  DeformationField phi = DeformationField::identity(Grid(9, 9));
  CHECK_THROWS_AS(warp_image(img, phi), std::invalid_argument);
}

TEST_CASE("mask warping keeps labels categorical") {
  Grid g(8, 8);
  Mask m(g, 3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) m.labels[g.index(i, j)] = (i < 4) ? 1 : 2;
  DeformationField phi = DeformationField::identity(g);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) phi.targets[0 * n + i] += 0.4;  // rounds down
  Mask out = warp_mask(m, phi);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK((out.labels[i] == 1 || out.labels[i] == 2));
    CHECK(out.labels[i] == m.labels[i]);
  }
  for (std::size_t i = 0; i < n; ++i) phi.targets[0 * n + i] += 0.2;  // now rounds up
  Mask out2 = warp_mask(m, phi);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(out2.labels[g.index(i, j)] == m.labels[g.index(std::min(i + 1, 7), j)]);
}
