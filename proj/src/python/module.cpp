#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mmreg/diffops.hpp"
#include "mmreg/metrics.hpp"
#include "mmreg/registration.hpp"
#include "mmreg/synth.hpp"
#include "mmreg/warp.hpp"

namespace py = pybind11;
using namespace mmreg;

namespace {

Grid grid_from_shape(const std::vector<py::ssize_t>& shape) {
  if (shape.size() == 2) return Grid(static_cast<int>(shape[0]), static_cast<int>(shape[1]));
  if (shape.size() == 3)
    return Grid(static_cast<int>(shape[0]), static_cast<int>(shape[1]),
                static_cast<int>(shape[2]));
  throw std::invalid_argument("expected a 2D or 3D array");
}

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;

ScalarField field_from(const DoubleArray& arr) {
  const auto info = arr.request();
  const Grid g = grid_from_shape(info.shape);
  const double* p = static_cast<const double*>(info.ptr);
  return ScalarField(g, std::vector<double>(p, p + g.size()));
}

py::array_t<double> array_from(const ScalarField& f) {
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < f.grid.ndim(); ++a) shape.push_back(f.grid.dim(a));
  py::array_t<double> out(shape);
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

Mask mask_from(const LabelArray& arr) {
  const auto info = arr.request();
  const Grid g = grid_from_shape(info.shape);
  const std::uint16_t* p = static_cast<const std::uint16_t*>(info.ptr);
  std::vector<std::uint16_t> labels(p, p + g.size());
  int count = 1;
  for (auto v : labels) count = std::max(count, static_cast<int>(v) + 1);
  return Mask(g, std::move(labels), count);
}

py::array_t<std::uint16_t> array_from(const Mask& m) {
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < m.grid.ndim(); ++a) shape.push_back(m.grid.dim(a));
  py::array_t<std::uint16_t> out(shape);
  std::copy(m.labels.begin(), m.labels.end(), out.mutable_data());
  return out;
}

// Deformations cross the boundary as (ndim, *dims) arrays of target
// coordinates, matching the axis-major storage exactly.
DeformationField phi_from(const DoubleArray& arr) {
  const auto info = arr.request();
  if (info.shape.size() < 3 || info.shape.size() > 4)
    throw std::invalid_argument("deformation array must have shape (ndim, *dims)");
  std::vector<py::ssize_t> dims(info.shape.begin() + 1, info.shape.end());
  const Grid g = grid_from_shape(dims);
  if (info.shape[0] != g.ndim())
    throw std::invalid_argument("deformation leading axis must equal ndim");
  DeformationField phi(g);
  const double* p = static_cast<const double*>(info.ptr);
  std::copy(p, p + phi.targets.size(), phi.targets.begin());
  return phi;
}

py::array_t<double> array_from(const DeformationField& phi) {
  std::vector<py::ssize_t> shape{phi.grid.ndim()};
  for (int a = 0; a < phi.grid.ndim(); ++a) shape.push_back(phi.grid.dim(a));
  py::array_t<double> out(shape);
  std::copy(phi.targets.begin(), phi.targets.end(), out.mutable_data());
  return out;
}

Dissimilarity loss_from(const std::string& s) {
  if (s == "auto") return Dissimilarity::automatic;
  if (s == "mse") return Dissimilarity::mse;
  if (s == "ncc") return Dissimilarity::ncc;
  throw std::invalid_argument("loss must be 'auto', 'mse' or 'ncc'");
}

py::dict detj_dict(const DetJStats& s) {
  py::dict d;
  d["min"] = s.min;
  d["max"] = s.max;
  d["pct_nonpositive"] = s.pct_nonpositive;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moving-mesh diffeomorphic image registration core";

  m.def(
      "register_pair",
      [](const DoubleArray& fixed, const DoubleArray& moving, double tau_lb,
         double tau_ub, double lam, const std::string& loss, double lr, int iters,
         int steps, std::uint64_t seed, bool plain_gd) {
        RegistrationConfig cfg;
        cfg.tau_lb = tau_lb;
        cfg.tau_ub = tau_ub;
        cfg.gamma_scale = lam;
        cfg.dissimilarity = loss_from(loss);
        cfg.learning_rate = lr;
        cfg.iterations = iters;
        cfg.euler_steps = steps;
        cfg.seed = seed;
        cfg.plain_gd = plain_gd;
        const ScalarField f = field_from(fixed);
        const ScalarField mv = field_from(moving);
        RegistrationResult r;
        {
          py::gil_scoped_release release;
          r = register_pair(f, mv, cfg);
        }
        py::dict out;
        out["phi_f"] = array_from(r.phi_f);
        out["phi_b"] = array_from(r.phi_b);
        out["mu"] = array_from(r.mu);
        out["loss_trace"] = r.loss_trace;
        out["detj"] = detj_dict(r.detj);
        out["best_iteration"] = r.best_iteration;
        out["best_loss"] = r.best_loss;
        out["seconds"] = r.seconds;
        return out;
      },
      py::arg("fixed"), py::arg("moving"), py::kw_only(), py::arg("tau_lb") = 0.2,
      py::arg("tau_ub") = 8.0, py::arg("lam") = 10.0, py::arg("loss") = "auto",
      py::arg("lr") = 5e-4, py::arg("iters") = 300, py::arg("steps") = 20,
      py::arg("seed") = 0, py::arg("plain_gd") = false,
      "Register moving onto fixed; returns transforms, monitor function and "
      "optimization diagnostics.");

  m.def(
      "build_deformation",
      [](const DoubleArray& raw_mu, const std::vector<DoubleArray>& raw_gamma,
         double tau_lb, double tau_ub, double lam, int steps) {
        DeformationParams p;
        p.raw_mu = field_from(raw_mu);
        for (const auto& g : raw_gamma) p.raw_gamma.push_back(field_from(g));
        p.tau_lb = tau_lb;
        p.tau_ub = tau_ub;
        p.gamma_scale = lam;
        const DeformationPair pair =
            build_deformation(p, {steps, Direction::forward});
        return py::make_tuple(array_from(pair.phi_f), array_from(pair.phi_b));
      },
      py::arg("raw_mu"), py::arg("raw_gamma"), py::kw_only(), py::arg("tau_lb") = 0.2,
      py::arg("tau_ub") = 8.0, py::arg("lam") = 10.0, py::arg("steps") = 20,
      "Raw parameter fields -> (phi_f, phi_b).");

  m.def(
      "warp_image",
      [](const DoubleArray& img, const DoubleArray& phi) {
        return array_from(warp_image(field_from(img), phi_from(phi)));
      },
      py::arg("image"), py::arg("phi"), "Linear-interpolation warp.");

  m.def(
      "warp_mask",
      [](const LabelArray& mask, const DoubleArray& phi) {
        return array_from(warp_mask(mask_from(mask), phi_from(phi)));
      },
      py::arg("mask"), py::arg("phi"), "Nearest-neighbor label warp.");

  m.def(
      "jacobian_determinant",
      [](const DoubleArray& phi) {
        return array_from(jacobian_determinant(phi_from(phi)));
      },
      py::arg("phi"));

  m.def(
      "identity_transform",
      [](const std::vector<int>& dims) {
        Grid g = dims.size() == 2 ? Grid(dims[0], dims[1])
                                  : Grid(dims[0], dims[1], dims[2]);
        return array_from(DeformationField::identity(g));
      },
      py::arg("dims"));

  m.def(
      "dice",
      [](const LabelArray& a, const LabelArray& b, int label) {
        return dice(mask_from(a), mask_from(b), label);
      },
      py::arg("a"), py::arg("b"), py::arg("label") = 1);

  m.def(
      "hausdorff_mm",
      [](const LabelArray& a, const LabelArray& b, int label) {
        return hausdorff_mm(mask_from(a), mask_from(b), label);
      },
      py::arg("a"), py::arg("b"), py::arg("label") = 1);

  m.def("reliability", &reliability, py::arg("dice_values"), py::arg("threshold"));

  m.def(
      "synth_pair",
      [](int size, int dim, const std::string& preset, std::uint64_t seed,
         double mu_amplitude, double gamma_amplitude, double cutoff, int gt_steps) {
        SynthConfig cfg;
        cfg.grid = dim == 2 ? Grid(size, size) : Grid(size, size, size);
        if (preset == "annulus")
          cfg.shape = TemplateShape::annulus;
        else if (preset == "disc")
          cfg.shape = TemplateShape::disc;
        else if (preset == "two-label")
          cfg.shape = TemplateShape::two_label;
        else
          throw std::invalid_argument("preset must be annulus, disc or two-label");
        cfg.seed = seed;
        if (mu_amplitude >= 0.0) cfg.mu_amplitude = mu_amplitude;
        if (gamma_amplitude >= 0.0) cfg.gamma_amplitude = gamma_amplitude;
        if (cutoff > 0.0) cfg.cutoff = cutoff;
        if (gt_steps > 0) cfg.gt_steps = gt_steps;
        const SynthPair pair = make_pair(cfg);
        py::dict out;
        out["fixed"] = array_from(pair.fixed);
        out["moving"] = array_from(pair.moving);
        out["fixed_mask"] = array_from(pair.fixed_mask);
        out["moving_mask"] = array_from(pair.moving_mask);
        out["phi_gt_f"] = array_from(pair.phi_gt_f);
        out["phi_gt_b"] = array_from(pair.phi_gt_b);
        return out;
      },
      py::arg("size"), py::kw_only(), py::arg("dim") = 2,
      py::arg("preset") = "annulus", py::arg("seed") = 0,
      py::arg("mu_amplitude") = -1.0, py::arg("gamma_amplitude") = -1.0,
      py::arg("cutoff") = -1.0, py::arg("gt_steps") = -1,
      "Seeded synthetic registration pair with ground-truth transforms.");
}
