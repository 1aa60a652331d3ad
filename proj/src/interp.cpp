#include "mmreg/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmreg {

LinearStencil linear_stencil(const Grid& grid, const double* point) {
  const int nd = grid.ndim();
  // Per-axis cell base, fraction and clamp state.
  int base[3];
  double frac[3];
  double live[3];  // 1 inside the domain, 0 where the coordinate was clamped
  for (int a = 0; a < nd; ++a) {
    const int n = grid.dim(a);
    const double p = point[a];
    double pc = p;
    double l = 1.0;
    if (pc <= 0.0) {
      l = (pc < 0.0) ? 0.0 : 1.0;
      pc = 0.0;
    } else if (pc >= n - 1) {
      l = (pc > n - 1) ? 0.0 : 1.0;
      pc = n - 1;
    }
    int i0 = static_cast<int>(pc);
    if (i0 > n - 2) i0 = n - 2;
    base[a] = i0;
    frac[a] = pc - i0;
    live[a] = l;
  }

  LinearStencil st;
  st.corners = 1 << nd;
  for (int c = 0; c < st.corners; ++c) {
    std::size_t idx = 0;
    double w = 1.0;
    for (int a = 0; a < nd; ++a) {
      const int bit = (c >> a) & 1;
      idx += static_cast<std::size_t>(base[a] + bit) * grid.stride(a);
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    st.index[c] = idx;
    st.weight[c] = w;
    for (int a = 0; a < nd; ++a) {
      double dw = live[a] * (((c >> a) & 1) ? 1.0 : -1.0);
      for (int b = 0; b < nd; ++b) {
        if (b == a) continue;
        dw *= ((c >> b) & 1) ? frac[b] : 1.0 - frac[b];
      }
      st.dweight[a][c] = dw;
    }
  }
  return st;
}

double interp_linear(const ScalarField& field, std::span<const double> point) {
  if (static_cast<int>(point.size()) != field.grid.ndim())
    throw std::invalid_argument("interp_linear: point dimensionality mismatch");
  return linear_stencil(field.grid, point.data()).value(field.values);
}

}  // namespace mmreg
