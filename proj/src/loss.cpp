#include "mmreg/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmreg {

namespace {

void check_same_grid(const Image& a, const Image& b, const char* who) {
  if (a.grid != b.grid)
    throw std::invalid_argument(std::string(who) + ": images on different grids");
}

struct NccTerms {
  double A, B, C;          // sum(ahat*bhat), sum(ahat^2), sum(bhat^2)
  double mean_a, mean_b;
};

NccTerms ncc_terms(const Image& a, const Image& b) {
  const std::size_t n = a.size();
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i];
    sb += b[i];
  }
  NccTerms t{};
  t.mean_a = sa / n;
  t.mean_b = sb / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double ah = a[i] - t.mean_a;
    const double bh = b[i] - t.mean_b;
    t.A += ah * bh;
    t.B += ah * ah;
    t.C += bh * bh;
  }
  if (t.B <= 0.0 || t.C <= 0.0)
    throw std::domain_error("loss_ncc: constant image has no correlation");
  return t;
}

}  // namespace

double loss_mse(const Image& a, const Image& b) {
  check_same_grid(a, b, "loss_mse");
  const std::size_t n = a.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = b[i] - a[i];
    acc += d * d;
  }
  return acc / n;
}

ScalarField loss_mse_grad_b(const Image& a, const Image& b) {
  check_same_grid(a, b, "loss_mse_grad_b");
  const std::size_t n = a.size();
  ScalarField g(a.grid);
  const double scale = 2.0 / n;
  for (std::size_t i = 0; i < n; ++i) g[i] = scale * (b[i] - a[i]);
  return g;
}

double loss_ncc(const Image& a, const Image& b) {
  check_same_grid(a, b, "loss_ncc");
  const NccTerms t = ncc_terms(a, b);
  return 1.0 - t.A / std::sqrt(t.B * t.C);
}

ScalarField loss_ncc_grad_b(const Image& a, const Image& b) {
  check_same_grid(a, b, "loss_ncc_grad_b");
  const NccTerms t = ncc_terms(a, b);
  const double inv_sqrt = 1.0 / std::sqrt(t.B * t.C);
  const double ratio = t.A / t.C;
  ScalarField g(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ah = a[i] - t.mean_a;
    const double bh = b[i] - t.mean_b;
    g[i] = -inv_sqrt * (ah - ratio * bh);
  }
  return g;
}

double dissimilarity_loss(Dissimilarity kind, const Image& a, const Image& b) {
  switch (resolve_dissimilarity(kind, a.grid)) {
    case Dissimilarity::mse:
      return loss_mse(a, b);
    case Dissimilarity::ncc:
      return loss_ncc(a, b);
    default:
      throw std::logic_error("dissimilarity_loss: unresolved kind");
  }
}

ScalarField dissimilarity_grad_b(Dissimilarity kind, const Image& a, const Image& b) {
  switch (resolve_dissimilarity(kind, a.grid)) {
    case Dissimilarity::mse:
      return loss_mse_grad_b(a, b);
    case Dissimilarity::ncc:
      return loss_ncc_grad_b(a, b);
    default:
      throw std::logic_error("dissimilarity_grad_b: unresolved kind");
  }
}

Dissimilarity resolve_dissimilarity(Dissimilarity kind, const Grid& grid) {
  if (kind != Dissimilarity::automatic) return kind;
  return grid.ndim() == 2 ? Dissimilarity::mse : Dissimilarity::ncc;
}

}  // namespace mmreg
