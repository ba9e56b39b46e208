// Command-line front end: experiment dispatch, field I/O and report output.
//
// Subcommands: apply, scaling, hedberg, theta-sum, ortho-decay,
// cone-measure, survey.  Every flag can also be given in a flat
// `key = value` config file via --config; command-line flags win.
// Each run writes report.json plus one or more CSV tables into --out,
// and exits 0 iff every pass/fail flag in the report passes.

#include "lightcone/cone_operator.hpp"
#include "lightcone/field.hpp"
#include "lightcone/maximal.hpp"
#include "lightcone/report.hpp"
#include "lightcone/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace lightcone;

namespace {

struct RunConfig {
  // kernel and exponents
  int n = 1;
  Real alpha = 0.5;
  Real p = 0.0;  // 0 = unset
  Real q = 0.0;  // 0 = derive from alpha/n = 1/p - 1/q

  // grid
  int grid_m = 64;
  Real grid_L = 4.0;
  Real grid_T = 4.0;

  // window / quadrature
  int eta = 12;
  int jmin = 1, jmax = 0;  // unset -> auto window
  int sub_u = 4, sub_v = 4, sub_omega = 16;

  // field selection
  std::string field = "gaussian";
  Real field_sigma = 1.0;
  Real field_cutoff = std::numeric_limits<Real>::infinity();
  Real field_radius = 1.0;
  int field_cell_ell = 2;
  int field_cell_j = 0;
  Real field_block = 1.0;

  // experiment specific
  std::string lambdas = "1,2,4";
  int samples = 200;           // hedberg sample points
  std::int64_t mc_samples = 200000;
  int configs = 20;            // intersection configurations
  int volume_cells = 10;
  int q_int = 3;
  int h_max = 6;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

std::vector<Real> parse_list(const std::string& text) {
  std::vector<Real> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

SampledField build_field(const RunConfig& cfg, const GridSpec& spec) {
  if (cfg.field == "gaussian" || cfg.field == "ball" ||
      cfg.field == "cone-bump" || cfg.field == "checkerboard") {
    TestFieldParams params;
    params.sigma = cfg.field_sigma;
    params.cutoff = cfg.field_cutoff;
    params.radius = cfg.field_radius;
    params.cell = CellIndex{cfg.field_cell_ell, cfg.field_cell_j};
    params.block = cfg.field_block;
    return make_test_field(parse_field_kind(cfg.field), spec, params);
  }
  SampledField f = load_field(cfg.field);
  if (f.spec.n != spec.n)
    throw std::invalid_argument("loaded field dimension differs from --n");
  return f;
}

// q from the flags, or derived (and echoed into the report) when omitted.
Real resolve_q(const RunConfig& cfg, Real p) {
  if (cfg.q > 0.0) {
    ExponentPair{p, cfg.q}.validate();
    return cfg.q;
  }
  return derive_q(p, cfg.alpha, cfg.n);
}

QuadratureOptions resolve_window(const RunConfig& cfg, const SampledField& f) {
  QuadratureOptions opts;
  opts.ell_max = cfg.eta;
  opts.sub_u = cfg.sub_u;
  opts.sub_v = cfg.sub_v;
  opts.sub_omega = cfg.sub_omega;
  if (cfg.jmin <= cfg.jmax) {
    opts.j_min = cfg.jmin;
    opts.j_max = cfg.jmax;
    opts.validate();
    return opts;
  }
  return auto_window(f, opts);
}

int finish(ExperimentReport rep, const RunConfig& cfg) {
  rep.params["seed"] = cfg.seed;
  rep.write(cfg.out_dir);
  std::cout << rep.summary();
  std::cout << rep.experiment << " runtime_s = " << format_real(rep.runtime_s)
            << '\n';
  std::cout << (rep.all_pass() ? "PASS" : "FAIL") << '\n';
  return rep.all_pass() ? 0 : 1;
}

int run_apply(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const SampledField f = build_field(cfg, spec);
  const KernelParams kp{cfg.n, cfg.alpha};
  const QuadratureOptions opts = resolve_window(cfg, f);

  ExperimentReport rep;
  rep.experiment = "apply";
  OperatorDiagnostics diag;
  const SampledField out = apply_full(f, kp, opts, &diag);
  std::filesystem::create_directories(cfg.out_dir);
  save_field(out, std::filesystem::path(cfg.out_dir) / "field.lcf");

  CsvTable tab;
  tab.columns = {"metric", "value"};
  tab.rows.push_back({0.0, out.values.maxCoeff()});
  tab.rows.push_back({1.0, out.values.sum() * f.spec.cell_volume()});
  rep.params = {{"kernel", {{"n", kp.n}, {"alpha", kp.alpha}}},
                {"field", cfg.field},
                {"grid", {{"n", spec.n}, {"L", spec.L}, {"T", spec.T}, {"m", spec.m}}},
                {"j_min", opts.j_min},
                {"j_max", opts.j_max},
                {"ell_max", opts.ell_max}};
  rep.metrics["output_max"] = out.values.maxCoeff();
  rep.metrics["output_l1"] = out.values.sum() * f.spec.cell_volume();
  rep.metrics["coarse_cells"] = Real(diag.coarse_cells);
  rep.metrics["window_tail_fraction"] = diag.window_tail_fraction;
  rep.flags["output_finite"] = out.values.isFinite().all();
  rep.flags["output_nonnegative"] = !(out.values < 0.0).any();
  rep.tables.push_back(std::move(tab));
  return finish(std::move(rep), cfg);
}

int run_scaling(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const SampledField f = build_field(cfg, spec);
  const KernelParams kp{cfg.n, cfg.alpha};
  if (!(cfg.p > 1.0)) throw std::invalid_argument("scaling requires --p > 1");
  const Real q = resolve_q(cfg, cfg.p);
  QuadratureOptions base;
  base.ell_max = cfg.eta;
  base.sub_u = cfg.sub_u;
  base.sub_v = cfg.sub_v;
  base.sub_omega = cfg.sub_omega;
  ExperimentReport rep =
      scaling_experiment(f, kp, cfg.p, q, parse_list(cfg.lambdas), base);
  rep.params["q_derived"] = cfg.q <= 0.0;
  return finish(std::move(rep), cfg);
}

int run_hedberg(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const SampledField f = build_field(cfg, spec);
  const KernelParams kp{cfg.n, cfg.alpha};
  if (!(cfg.p > 1.0)) throw std::invalid_argument("hedberg requires --p > 1");
  const Real q = resolve_q(cfg, cfg.p);
  const QuadratureOptions opts = resolve_window(cfg, f);
  ExperimentReport rep =
      hedberg_check(f, kp, cfg.p, q, cfg.samples, cfg.seed, opts);
  rep.params["q_derived"] = cfg.q <= 0.0;
  return finish(std::move(rep), cfg);
}

int run_theta_sum(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const SampledField f = build_field(cfg, spec);
  const KernelParams kp{cfg.n, cfg.alpha};
  const Real p = cfg.p > 1.0 ? cfg.p : 2.0;
  const QuadratureOptions opts = resolve_window(cfg, f);
  return finish(theta_sum_check(f, kp, p, opts), cfg);
}

int run_ortho(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const SampledField f = build_field(cfg, spec);
  const KernelParams kp{cfg.n, cfg.alpha};
  OrthoConfig ocfg;
  ocfg.q_int = cfg.q_int;
  ocfg.h_max = cfg.h_max;
  // p from the exponent line against the integer q
  const Real p = cfg.p > 1.0
                     ? cfg.p
                     : 1.0 / (cfg.alpha / Real(cfg.n) + 1.0 / Real(cfg.q_int));
  const QuadratureOptions opts = resolve_window(cfg, f);
  return finish(ortho_decay(f, kp, p, ocfg, opts), cfg);
}

int run_cone_measure(const RunConfig& cfg) {
  // two sub-experiments: closed-form cell volumes and the translated-cell
  // intersection bound, merged into one report
  ExperimentReport vols =
      cell_volume_check(cfg.n, cfg.volume_cells, cfg.mc_samples, cfg.seed);
  ExperimentReport inter = intersection_bound_check(
      cfg.n, cfg.configs, cfg.mc_samples, cfg.seed, 2);

  ExperimentReport rep;
  rep.experiment = "cone-measure";
  rep.params = {{"n", cfg.n},
                {"volume_cells", cfg.volume_cells},
                {"configs", cfg.configs},
                {"samples", cfg.mc_samples}};
  for (const auto& [k, v] : vols.metrics) rep.metrics["volume_" + k] = v;
  for (const auto& [k, v] : inter.metrics) rep.metrics[k] = v;
  for (const auto& [k, v] : vols.flags) rep.flags["volume_" + k] = v;
  for (const auto& [k, v] : inter.flags) rep.flags[k] = v;
  rep.runtime_s = vols.runtime_s + inter.runtime_s;
  inter.tables[0].name = "samples";
  vols.tables[0].name = "volumes";
  rep.tables.push_back(std::move(inter.tables[0]));
  rep.tables.push_back(std::move(vols.tables[0]));
  return finish(std::move(rep), cfg);
}

int run_survey(const RunConfig& cfg) {
  GridSpec spec{cfg.n, cfg.grid_L, cfg.grid_T, cfg.grid_m};
  const KernelParams kp{cfg.n, cfg.alpha};
  if (!(cfg.p > 1.0)) throw std::invalid_argument("survey requires --p > 1");
  const Real q = resolve_q(cfg, cfg.p);

  TestFieldParams params;
  params.sigma = cfg.field_sigma;
  params.radius = cfg.field_radius;
  params.cell = CellIndex{cfg.field_cell_ell, cfg.field_cell_j};
  params.block = cfg.field_block;
  std::vector<std::pair<std::string, SampledField>> fields;
  for (auto kind : {TestFieldKind::gaussian, TestFieldKind::ball_indicator,
                    TestFieldKind::cone_bump, TestFieldKind::checkerboard})
    fields.emplace_back(field_kind_name(kind),
                        make_test_field(kind, spec, params));

  QuadratureOptions base;
  base.ell_max = cfg.eta;
  base.sub_u = cfg.sub_u;
  base.sub_v = cfg.sub_v;
  base.sub_omega = cfg.sub_omega;
  ExperimentReport rep = norm_ratio_survey(fields, kp, cfg.p, q, base);
  rep.params["q_derived"] = cfg.q <= 0.0;
  return finish(std::move(rep), cfg);
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "spatial dimension (1..3)")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "kernel order, 0 < alpha < n")
      ->capture_default_str();
  cmd->add_option("--p", cfg.p, "source Lebesgue exponent, p > 1");
  cmd->add_option("--q", cfg.q,
                  "target Lebesgue exponent; omitted = derived from "
                  "alpha/n = 1/p - 1/q");
  cmd->add_option("--grid-m", cfg.grid_m, "nodes per axis (>= 8)")
      ->check(CLI::Range(8, 4096))
      ->capture_default_str();
  cmd->add_option("--grid-L", cfg.grid_L, "spatial half-width")
      ->capture_default_str();
  cmd->add_option("--grid-T", cfg.grid_T, "time half-width")
      ->capture_default_str();
  cmd->add_option("--eta", cfg.eta, "eccentricity cutoff (ell_max)")
      ->check(CLI::Range(0, 40))
      ->capture_default_str();
  cmd->add_option("--jmin", cfg.jmin, "dyadic window lower scale (default auto)");
  cmd->add_option("--jmax", cfg.jmax, "dyadic window upper scale (default auto)");
  cmd->add_option("--sub-u", cfg.sub_u, "u subdivisions per cell")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd->add_option("--sub-v", cfg.sub_v, "v subdivisions per cell")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd->add_option("--sub-omega", cfg.sub_omega, "base angular nodes per cell")
      ->check(CLI::Range(1, 4096))
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--out", cfg.out_dir, "output directory")
      ->capture_default_str();
  cmd->add_option("--field", cfg.field,
                  "gaussian|ball|cone-bump|checkerboard or a field file path")
      ->capture_default_str();
  cmd->add_option("--field-sigma", cfg.field_sigma, "gaussian width")
      ->capture_default_str();
  cmd->add_option("--field-cutoff", cfg.field_cutoff,
                  "gaussian hard support radius (default none)");
  cmd->add_option("--field-radius", cfg.field_radius, "ball radius")
      ->capture_default_str();
  cmd->add_option("--field-cell-ell", cfg.field_cell_ell,
                  "cone-bump cell eccentricity")
      ->capture_default_str();
  cmd->add_option("--field-cell-j", cfg.field_cell_j, "cone-bump cell scale")
      ->capture_default_str();
  cmd->add_option("--field-block", cfg.field_block, "checkerboard block size")
      ->capture_default_str();
  cmd->set_config("--config", "",
                  "flat key = value config file; flags take precedence");
  cmd->allow_config_extras(CLI::config_extras_mode::error);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lightcone: fractional integration with singularity on the light "
      "cone; dyadic cone decomposition, maximal operators and the desk-scale "
      "experiment harness"};
  app.require_subcommand(1);

  RunConfig cfg;

  auto* apply = app.add_subcommand("apply", "apply the truncated operator and save the output field");
  auto* scaling = app.add_subcommand("scaling", "dilation scaling law of ||I f_lambda||_q / ||f_lambda||_p");
  auto* hedberg = app.add_subcommand("hedberg", "pointwise bound by theta^{1/p-1/q} M^{p/q} ||f||^{1-p/q}");
  auto* theta = app.add_subcommand("theta-sum", "sum of the normalized shell masses is at most 1");
  auto* ortho = app.add_subcommand("ortho-decay", "almost-orthogonality decay of cross terms in the level gap");
  auto* cone = app.add_subcommand("cone-measure", "Monte Carlo cell volumes and the translated-cell intersection bound");
  auto* survey = app.add_subcommand("survey", "norm ratios across the bundled test fields");

  for (auto* cmd : {apply, scaling, hedberg, theta, ortho, cone, survey})
    add_common_flags(cmd, cfg);

  scaling->add_option("--lambdas", cfg.lambdas, "comma-separated dilation factors")
      ->capture_default_str();
  hedberg->add_option("--samples", cfg.samples, "sample points")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  for (auto* cmd : {cone})
    cmd->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples per estimate")
        ->check(CLI::Range(std::int64_t(1000), std::int64_t(100000000)))
        ->capture_default_str();
  cone->add_option("--configs", cfg.configs, "intersection configurations")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  cone->add_option("--volume-cells", cfg.volume_cells, "random cells for the volume check")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  ortho->add_option("--q-int", cfg.q_int, "integer exponent of the cross terms")
      ->check(CLI::Range(2, 16))
      ->capture_default_str();
  ortho->add_option("--h-max", cfg.h_max, "largest level gap")
      ->check(CLI::Range(1, 40))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (apply->parsed()) return run_apply(cfg);
    if (scaling->parsed()) return run_scaling(cfg);
    if (hedberg->parsed()) return run_hedberg(cfg);
    if (theta->parsed()) return run_theta_sum(cfg);
    if (ortho->parsed()) return run_ortho(cfg);
    if (cone->parsed()) return run_cone_measure(cfg);
    if (survey->parsed()) return run_survey(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
