#include "mmreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmreg {

double dice(const Mask& a, const Mask& b, int label) {
  if (a.grid != b.grid) throw std::invalid_argument("dice: masks on different grids");
  std::size_t na = 0, nb = 0, ni = 0;
  const auto lab = static_cast<std::uint16_t>(label);
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const bool in_a = a.labels[i] == lab;
    const bool in_b = b.labels[i] == lab;
    na += in_a;
    nb += in_b;
    ni += in_a && in_b;
  }
  if (na + nb == 0) return 1.0;
  return 2.0 * static_cast<double>(ni) / static_cast<double>(na + nb);
}

std::vector<std::array<int, 3>> contour_points(const Mask& m, int label) {
  const Grid& g = m.grid;
  const int nd = g.ndim();
  const auto lab = static_cast<std::uint16_t>(label);
  std::vector<std::array<int, 3>> out;

  auto is_bg = [&](const int* c) {
    for (int a = 0; a < nd; ++a)
      if (c[a] < 0 || c[a] >= g.dim(a)) return true;  // outside the grid
    std::size_t idx = static_cast<std::size_t>(c[0]);
    for (int a = 1; a < nd; ++a) idx = idx * g.dim(a) + c[a];
    return m.labels[idx] != lab;
  };

  int c[3] = {0, 0, 0};
  const int n2 = nd == 3 ? g.dim(2) : 1;
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j)
      for (int k = 0; k < n2; ++k) {
        c[0] = i;
        c[1] = j;
        c[2] = k;
        std::size_t idx = static_cast<std::size_t>(i);
        for (int a = 1; a < nd; ++a) idx = idx * g.dim(a) + c[a];
        if (m.labels[idx] != lab) continue;
        bool boundary = false;
        for (int a = 0; a < nd && !boundary; ++a) {
          int nb[3] = {c[0], c[1], c[2]};
          nb[a] = c[a] - 1;
          if (is_bg(nb)) boundary = true;
          nb[a] = c[a] + 1;
          if (is_bg(nb)) boundary = true;
        }
        if (boundary) out.push_back({i, j, nd == 3 ? k : 0});
      }
  return out;
}

namespace {

double directed_hausdorff(const std::vector<std::array<int, 3>>& from,
                          const std::vector<std::array<int, 3>>& to, const Grid& g) {
  const int nd = g.ndim();
  double worst = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      double d2 = 0.0;
      for (int a = 0; a < nd; ++a) {
        const double d = (p[a] - q[a]) * g.spacing(a);
        d2 += d * d;
      }
      best = std::min(best, d2);
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace

double hausdorff_mm(const Mask& a, const Mask& b, int label) {
  if (a.grid != b.grid)
    throw std::invalid_argument("hausdorff_mm: masks on different grids");
  const auto ca = contour_points(a, label);
  const auto cb = contour_points(b, label);
  if (ca.empty() || cb.empty())
    throw std::domain_error("hausdorff_mm: empty region for requested label");
  return std::max(directed_hausdorff(ca, cb, a.grid),
                  directed_hausdorff(cb, ca, a.grid));
}

DetJStats detj_stats(const DeformationField& phi) { return detj_stats_of(phi); }

double reliability(const std::vector<double>& dice_values, double d) {
  if (dice_values.empty()) throw std::invalid_argument("reliability: empty list");
  if (!(d >= 0.0 && d <= 1.0))
    throw std::invalid_argument("reliability: threshold outside [0, 1]");
  std::size_t hits = 0;
  for (double v : dice_values) hits += v > d;
  return static_cast<double>(hits) / dice_values.size();
}

}  // namespace mmreg
