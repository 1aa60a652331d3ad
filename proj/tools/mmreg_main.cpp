#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmreg/diffops.hpp"
#include "mmreg/field_io.hpp"
#include "mmreg/metrics.hpp"
#include "mmreg/registration.hpp"
#include "mmreg/synth.hpp"
#include "mmreg/warp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace mmreg;

Image load_image(const fs::path& p) {
  FieldFile f = read_any(p);
  if (f.kind == FieldKind::image || f.kind == FieldKind::scalar_field)
    return f.as_scalar();
  throw std::runtime_error(p.string() + ": expected an image");
}

Mask load_mask(const fs::path& p) {
  FieldFile f = read_field_file(p);
  if (f.kind != FieldKind::mask)
    throw std::runtime_error(p.string() + ": expected a mask");
  return f.as_mask();
}

DeformationField load_phi(const fs::path& p) {
  FieldFile f = read_field_file(p);
  if (f.kind != FieldKind::deformation)
    throw std::runtime_error(p.string() + ": expected a deformation field");
  return f.as_deformation();
}

double mean_displacement_px(const DeformationField& phi) {
  const DeformationField id = DeformationField::identity(phi.grid);
  const std::size_t n = phi.grid.size();
  const int nd = phi.grid.ndim();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (int a = 0; a < nd; ++a) {
      const double d = phi.targets[a * n + i] - id.targets[a * n + i];
      d2 += d * d;
    }
    acc += std::sqrt(d2);
  }
  return acc / static_cast<double>(n);
}

json detj_json(const DetJStats& s) {
  return json{{"min", s.min}, {"max", s.max}, {"pct_nonpositive", s.pct_nonpositive}};
}

Image warp_image_nearest(const Image& img, const DeformationField& phi) {
  if (img.grid != phi.grid)
    throw std::invalid_argument("warp: image and transform grids differ");
  Image out(img.grid);
  const std::size_t n = img.grid.size();
  const int nd = img.grid.ndim();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (int a = 0; a < nd; ++a) {
      long c = std::lround(phi.targets[a * n + i]);
      c = std::clamp(c, 0L, static_cast<long>(img.grid.dim(a) - 1));
      idx = idx * img.grid.dim(a) + static_cast<std::size_t>(c);
    }
    out[i] = img.values[idx];
  }
  return out;
}

struct RegisterArgs {
  std::string fixed, moving, out;
  std::string loss;  // empty = automatic
  RegistrationConfig cfg;
};

void run_register(const RegisterArgs& a) {
  RegistrationConfig cfg = a.cfg;
  if (a.loss == "mse")
    cfg.dissimilarity = Dissimilarity::mse;
  else if (a.loss == "ncc")
    cfg.dissimilarity = Dissimilarity::ncc;

  const Image fixed = load_image(a.fixed);
  const Image moving = load_image(a.moving);
  const RegistrationResult r = register_pair(fixed, moving, cfg);

  fs::create_directories(a.out);
  const fs::path dir(a.out);
  write_deformation(dir / "phi_f.fld", r.phi_f);
  write_deformation(dir / "phi_b.fld", r.phi_b);
  write_image(dir / "warped_moving.fld", warp_image(moving, r.phi_f));
  write_image(dir / "warped_fixed.fld", warp_image(fixed, r.phi_b));

  {
    std::ofstream csv(dir / "loss.csv", std::ios::trunc);
    csv << "iter,loss\n";
    csv.precision(17);
    for (std::size_t i = 0; i < r.loss_trace.size(); ++i)
      csv << i << "," << r.loss_trace[i] << "\n";
    if (!csv) throw std::runtime_error((dir / "loss.csv").string() + ": write failed");
  }

  json summary{
      {"detj", detj_json(r.detj)},
      {"mean_displacement_px", mean_displacement_px(r.phi_f)},
      {"best_loss", r.best_loss},
      {"best_iteration", r.best_iteration},
      {"final_loss", r.loss_trace.empty() ? r.best_loss : r.loss_trace.back()},
      {"iterations", cfg.iterations},
      {"loss",
       resolve_dissimilarity(cfg.dissimilarity, fixed.grid) == Dissimilarity::mse
           ? "mse"
           : "ncc"},
      {"seed", cfg.seed},
      {"seconds", r.seconds},
  };
  std::ofstream sj(dir / "summary.json", std::ios::trunc);
  sj << summary.dump(2) << "\n";
  if (!sj) throw std::runtime_error((dir / "summary.json").string() + ": write failed");
  std::cout << summary.dump(2) << "\n";
}

struct WarpArgs {
  std::string input, phi, out;
  bool nearest = false;
};

void run_warp(const WarpArgs& a) {
  const FieldFile in = read_any(a.input);
  const DeformationField phi = load_phi(a.phi);
  switch (in.kind) {
    case FieldKind::mask:
      write_mask(a.out, warp_mask(in.as_mask(), phi));
      break;
    case FieldKind::image:
      write_image(a.out, a.nearest ? warp_image_nearest(in.as_scalar(), phi)
                                   : warp_image(in.as_scalar(), phi));
      break;
    case FieldKind::scalar_field:
      write_scalar_field(a.out, a.nearest ? warp_image_nearest(in.as_scalar(), phi)
                                          : warp_image(in.as_scalar(), phi));
      break;
    case FieldKind::deformation:
      throw std::runtime_error(a.input + ": cannot warp a deformation field");
  }
}

struct JacobianArgs {
  std::string phi, out;
  bool summary = false;
};

void run_jacobian(const JacobianArgs& a) {
  if (a.out.empty() && !a.summary)
    throw std::runtime_error("jacobian: need --out and/or --summary");
  const DeformationField phi = load_phi(a.phi);
  const ScalarField det = jacobian_determinant(phi);
  if (!a.out.empty()) write_scalar_field(a.out, det);
  if (a.summary) std::cout << detj_json(detj_stats(phi)).dump() << "\n";
}

struct MetricsArgs {
  std::string fixed_mask, moved_mask, batch;
  int label = 1;
  bool hd = false;
  double reliability_d = -1.0;  // <0 = not requested
};

json metrics_record(const Mask& a, const Mask& b, int label, bool hd) {
  json rec{{"label", label}, {"dice", dice(a, b, label)}};
  if (hd) rec["hausdorff_mm"] = hausdorff_mm(a, b, label);
  return rec;
}

void run_metrics(const MetricsArgs& a) {
  const bool single = !a.fixed_mask.empty() || !a.moved_mask.empty();
  const bool batch = !a.batch.empty();
  if (single == batch)
    throw std::runtime_error(
        "metrics: use either --fixed-mask/--moved-mask or --batch");
  if (single) {
    if (a.fixed_mask.empty() || a.moved_mask.empty())
      throw std::runtime_error("metrics: both --fixed-mask and --moved-mask required");
    if (a.reliability_d >= 0.0)
      throw std::runtime_error("metrics: --reliability requires --batch");
    const Mask ma = load_mask(a.fixed_mask);
    const Mask mb = load_mask(a.moved_mask);
    std::cout << metrics_record(ma, mb, a.label, a.hd).dump() << "\n";
    return;
  }

  std::ifstream in(a.batch);
  if (!in) throw std::runtime_error(a.batch + ": cannot open batch list");
  json out;
  out["cases"] = json::array();
  std::vector<double> dices;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = line.find(',', pos);
      std::string cell = line.substr(pos, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - pos);
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      parts.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (parts.size() < 2 || parts.size() > 3 || parts[0].empty() || parts[1].empty())
      throw std::runtime_error(a.batch + ":" + std::to_string(lineno) +
                               ": expected 'fixed,moved[,label]'");
    int label = a.label;
    if (parts.size() == 3) {
      try {
        label = std::stoi(parts[2]);
      } catch (const std::exception&) {
        throw std::runtime_error(a.batch + ":" + std::to_string(lineno) +
                                 ": bad label '" + parts[2] + "'");
      }
    }
    const Mask ma = load_mask(parts[0]);
    const Mask mb = load_mask(parts[1]);
    json rec = metrics_record(ma, mb, label, a.hd);
    rec["fixed"] = parts[0];
    rec["moved"] = parts[1];
    dices.push_back(rec["dice"].get<double>());
    out["cases"].push_back(std::move(rec));
  }
  out["count"] = dices.size();
  if (a.reliability_d >= 0.0)
    out["reliability"] = json{{"threshold", a.reliability_d},
                              {"value", reliability(dices, a.reliability_d)}};
  std::cout << out.dump(2) << "\n";
}

struct SynthArgs {
  std::string preset = "annulus";
  int size = 64;
  int dim = 2;
  double amplitude = -1.0;  // <0 = keep per-field defaults
  double mu_amplitude = -1.0;
  double gamma_amplitude = -1.0;
  double cutoff = -1.0;
  int gt_steps = -1;
  std::uint64_t seed = 0;
  std::string out;
};

void run_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.grid = a.dim == 2 ? Grid(a.size, a.size) : Grid(a.size, a.size, a.size);
  if (a.preset == "annulus")
    cfg.shape = TemplateShape::annulus;
  else if (a.preset == "disc")
    cfg.shape = TemplateShape::disc;
  else if (a.preset == "two-label")
    cfg.shape = TemplateShape::two_label;
  else
    throw std::runtime_error("synth: unknown preset '" + a.preset + "'");
  if (a.amplitude >= 0.0) {
    cfg.mu_amplitude = a.amplitude;
    cfg.gamma_amplitude = a.amplitude;
  }
  if (a.mu_amplitude >= 0.0) cfg.mu_amplitude = a.mu_amplitude;
  if (a.gamma_amplitude >= 0.0) cfg.gamma_amplitude = a.gamma_amplitude;
  if (a.cutoff > 0.0) cfg.cutoff = a.cutoff;
  if (a.gt_steps > 0) cfg.gt_steps = a.gt_steps;
  cfg.seed = a.seed;

  const SynthPair pair = make_pair(cfg);
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  write_image(dir / "fixed.fld", pair.fixed);
  write_image(dir / "moving.fld", pair.moving);
  write_mask(dir / "fixed_mask.fld", pair.fixed_mask);
  write_mask(dir / "moving_mask.fld", pair.moving_mask);
  write_deformation(dir / "phi_gt_f.fld", pair.phi_gt_f);
  write_deformation(dir / "phi_gt_b.fld", pair.phi_gt_b);

  json info{{"out", a.out},
            {"preset", a.preset},
            {"size", a.size},
            {"dim", a.dim},
            {"seed", a.seed},
            {"dice_unregistered", dice(pair.fixed_mask, pair.moving_mask, 1)},
            {"detj_gt", detj_json(detj_stats(pair.phi_gt_f))}};
  std::cout << info.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-mesh diffeomorphic image registration"};
  app.require_subcommand(1);

  RegisterArgs ra;
  auto* reg = app.add_subcommand("register", "Register a moving image onto a fixed image");
  reg->add_option("--fixed", ra.fixed, "Fixed image (.fld header or .pgm)")->required();
  reg->add_option("--moving", ra.moving, "Moving image (.fld header or .pgm)")->required();
  reg->add_option("--out", ra.out, "Output directory")->required();
  reg->add_option("--tau-lb", ra.cfg.tau_lb, "Monitor function lower bound")
      ->capture_default_str();
  reg->add_option("--tau-ub", ra.cfg.tau_ub, "Monitor function upper bound")
      ->capture_default_str();
  reg->add_option("--lambda", ra.cfg.gamma_scale, "Curl magnitude bound")
      ->capture_default_str();
  reg->add_option("--loss", ra.loss, "Dissimilarity (default: mse in 2D, ncc in 3D)")
      ->check(CLI::IsMember({"mse", "ncc"}));
  reg->add_option("--lr", ra.cfg.learning_rate, "Learning rate")->capture_default_str();
  reg->add_option("--iters", ra.cfg.iterations, "Optimization iterations")
      ->capture_default_str();
  reg->add_option("--steps", ra.cfg.euler_steps, "Euler integration steps")
      ->capture_default_str();
  reg->add_option("--seed", ra.cfg.seed, "Recorded RNG seed")->capture_default_str();
  reg->add_flag("--plain-gd", ra.cfg.plain_gd,
                "Plain gradient descent instead of adaptive moments");
  reg->callback([&ra] { run_register(ra); });

  WarpArgs wa;
  auto* wrp = app.add_subcommand("warp", "Apply a deformation to an image or mask");
  wrp->add_option("--input", wa.input, "Image or mask to warp")->required();
  wrp->add_option("--phi", wa.phi, "Deformation field file")->required();
  wrp->add_option("--out", wa.out, "Output field file")->required();
  wrp->add_flag("--nearest", wa.nearest,
                "Nearest-neighbor sampling (always used for masks)");
  wrp->callback([&wa] { run_warp(wa); });

  JacobianArgs ja;
  auto* jac = app.add_subcommand("jacobian", "Jacobian determinant of a deformation");
  jac->add_option("--phi", ja.phi, "Deformation field file")->required();
  jac->add_option("--out", ja.out, "Write the determinant as a scalar field");
  jac->add_flag("--summary", ja.summary, "Print min/max/%nonpositive as JSON");
  jac->callback([&ja] { run_jacobian(ja); });

  MetricsArgs ma;
  auto* met = app.add_subcommand("metrics", "Overlap and contour-distance metrics");
  met->add_option("--fixed-mask", ma.fixed_mask, "Reference mask");
  met->add_option("--moved-mask", ma.moved_mask, "Mask under evaluation");
  met->add_option("--label", ma.label, "Label to evaluate")->capture_default_str();
  met->add_flag("--hd", ma.hd, "Also compute the Hausdorff distance");
  met->add_option("--batch", ma.batch,
                  "File of 'fixed,moved[,label]' lines, one case per line");
  met->add_option("--reliability", ma.reliability_d,
                  "With --batch: report fraction of cases with Dice > threshold");
  met->callback([&ma] { run_metrics(ma); });

  SynthArgs sa;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic registration pair");
  syn->add_option("--preset", sa.preset, "annulus | disc | two-label")
      ->check(CLI::IsMember({"annulus", "disc", "two-label"}))
      ->capture_default_str();
  syn->add_option("--size", sa.size, "Grid points per axis")->capture_default_str();
  syn->add_option("--dim", sa.dim, "2 or 3")->check(CLI::IsMember({2, 3}))
      ->capture_default_str();
  syn->add_option("--amplitude", sa.amplitude,
                  "Raw parameter amplitude for both fields");
  syn->add_option("--mu-amplitude", sa.mu_amplitude, "Monitor-field raw amplitude");
  syn->add_option("--gamma-amplitude", sa.gamma_amplitude, "Curl-field raw amplitude");
  syn->add_option("--cutoff", sa.cutoff, "Low-pass cutoff, fraction of bandwidth");
  syn->add_option("--gt-steps", sa.gt_steps, "Reference integration steps");
  syn->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
  syn->add_option("--out", sa.out, "Output directory")->required();
  syn->callback([&sa] { run_synth(sa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      std::cerr << "mmreg: error: " << e.what() << "\n";
      return e.get_exit_code();
    }
    return app.exit(e);  // --help and friends
  } catch (const std::exception& e) {
    std::cerr << "mmreg: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
