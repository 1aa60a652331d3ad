#include "mmreg/field.hpp"

namespace mmreg {

DeformationField DeformationField::identity(const Grid& g) {
  DeformationField phi(g);
  const std::size_t n = g.size();
  if (g.ndim() == 2) {
    std::size_t idx = 0;
    for (int i = 0; i < g.dim(0); ++i)
      for (int j = 0; j < g.dim(1); ++j, ++idx) {
        phi.targets[idx] = i;
        phi.targets[n + idx] = j;
      }
  } else {
    std::size_t idx = 0;
    for (int i = 0; i < g.dim(0); ++i)
      for (int j = 0; j < g.dim(1); ++j)
        for (int k = 0; k < g.dim(2); ++k, ++idx) {
          phi.targets[idx] = i;
          phi.targets[n + idx] = j;
          phi.targets[2 * n + idx] = k;
        }
  }
  return phi;
}

}  // namespace mmreg
