#include "mmreg/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmreg/interp.hpp"

namespace mmreg {

Image warp_image(const Image& img, const DeformationField& phi) {
  if (img.grid != phi.grid)
    throw std::invalid_argument("warp_image: image and transform grids differ");
  const std::size_t n = img.grid.size();
  const int nd = img.grid.ndim();
  Image out(img.grid);
  double p[3];
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < nd; ++a) p[a] = phi.targets[a * n + i];
    out[i] = linear_stencil(img.grid, p).value(img.values);
  }
  return out;
}

Mask warp_mask(const Mask& mask, const DeformationField& phi) {
  if (mask.grid != phi.grid)
    throw std::invalid_argument("warp_mask: mask and transform grids differ");
  const std::size_t n = mask.grid.size();
  const int nd = mask.grid.ndim();
  Mask out(mask.grid, mask.label_count);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (int a = 0; a < nd; ++a) {
      const double p = phi.targets[a * n + i];
      long q = std::lround(p);
      q = std::clamp(q, 0L, static_cast<long>(mask.grid.dim(a) - 1));
      idx += static_cast<std::size_t>(q) * mask.grid.stride(a);
    }
    out.labels[i] = mask.labels[idx];
  }
  return out;
}

std::vector<double> warp_vjp_phi(const Image& img, const DeformationField& phi,
                                 const ScalarField& out_bar) {
  if (img.grid != phi.grid || out_bar.grid != phi.grid)
    throw std::invalid_argument("warp_vjp_phi: grids differ");
  const std::size_t n = img.grid.size();
  const int nd = img.grid.ndim();
  std::vector<double> phi_bar(static_cast<std::size_t>(nd) * n, 0.0);
  double p[3];
  for (std::size_t i = 0; i < n; ++i) {
    const double bar = out_bar[i];
    if (bar == 0.0) continue;
    for (int a = 0; a < nd; ++a) p[a] = phi.targets[a * n + i];
    const LinearStencil st = linear_stencil(img.grid, p);
    for (int a = 0; a < nd; ++a)
      phi_bar[a * n + i] = bar * st.point_derivative(img.values, a);
  }
  return phi_bar;
}

}  // namespace mmreg
