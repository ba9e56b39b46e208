#include "lightcone/verify.hpp"

#include "lightcone/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace lightcone {

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  Real seconds() const {
    return std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

nlohmann::json grid_json(const GridSpec& g) {
  return {{"n", g.n}, {"L", g.L}, {"T", g.T}, {"m", g.m}};
}

nlohmann::json window_json(const QuadratureOptions& o) {
  return {{"j_min", o.j_min},       {"j_max", o.j_max},
          {"ell_max", o.ell_max},   {"sub_u", o.sub_u},
          {"sub_v", o.sub_v},       {"sub_omega", o.sub_omega},
          {"v_weight_exact", o.v_weight_exact}};
}

Real percentile(std::vector<Real> v, Real frac) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t i =
      std::size_t(frac * Real(v.size() - 1) + 0.5);
  return v[std::min(i, v.size() - 1)];
}

Real int_pow(Real base, int e) {
  Real out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

ExperimentReport scaling_experiment(const SampledField& f,
                                    const KernelParams& params, Real p, Real q,
                                    const std::vector<Real>& lambdas,
                                    QuadratureOptions base, Real tolerance) {
  Stopwatch timer;
  params.validate();
  ExponentPair{p, q}.validate();
  if (lambdas.size() < 2)
    throw std::invalid_argument(
        "scaling_experiment: need at least two dilation factors to fit an "
        "exponent");
  if (!(lp_norm(f, p) > 0.0))
    throw std::invalid_argument("scaling_experiment: degenerate field");

  ExperimentReport rep;
  rep.experiment = "scaling";
  CsvTable tab;
  tab.columns = {"lambda", "norm_p_f", "norm_q_If",
                 "ratio",  "log2_lambda", "log2_ratio"};

  std::vector<Real> lx, ly;
  QuadratureOptions used{};
  for (Real lambda : lambdas) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("scaling_experiment: lambda must be positive");
    const SampledField fl = dilate(f, lambda);
    used = auto_window(fl, base);
    const SampledField If = apply_full(fl, params, used);
    const Real np = lp_norm(fl, p);
    const Real nq = lp_norm(If, q);
    const Real ratio = nq / np;
    tab.rows.push_back({lambda, np, nq, ratio, std::log2(lambda),
                        std::log2(ratio)});
    lx.push_back(std::log2(lambda));
    ly.push_back(std::log2(ratio));
  }
  const LineFit fit = fit_line(lx, ly);
  const Real analytic =
      Real(params.n + 1) * (1.0 / p - 1.0 / q - params.alpha / Real(params.n));

  rep.params = {{"kernel", {{"n", params.n}, {"alpha", params.alpha}}},
                {"p", p},
                {"q", q},
                {"lambdas", lambdas},
                {"grid", grid_json(f.spec)},
                {"window", window_json(used)},
                {"tolerance", tolerance}};
  rep.metrics["exponent_fit"] = fit.slope;
  rep.metrics["exponent_analytic"] = analytic;
  rep.metrics["exponent_abs_error"] = std::abs(fit.slope - analytic);
  rep.flags["exponent_matches"] = std::abs(fit.slope - analytic) <= tolerance;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

ExperimentReport hedberg_check(const SampledField& f,
                               const KernelParams& params, Real p, Real q,
                               int sample_count, std::uint64_t seed,
                               const QuadratureOptions& opts) {
  Stopwatch timer;
  params.validate();
  opts.validate();
  ExponentPair ep{p, q};
  if (!ep.on_line(params.alpha, params.n))
    throw std::invalid_argument(
        "hedberg_check: exponents must satisfy alpha/n = 1/p - 1/q");
  if (sample_count < 1)
    throw std::invalid_argument("hedberg_check: need at least one sample");
  const Real norm = lp_norm(f, p);
  if (!(norm > 0.0))
    throw std::invalid_argument("hedberg_check: degenerate field");

  const SphereGrid grid = build_sphere_grid(params.n, opts.ell_max);
  const GridSpec& g = f.spec;

  // one quadrature per cell, reused across all samples
  std::vector<std::vector<CellQuadrature>> quads(std::size_t(opts.ell_max) + 1);
  for (int ell = 0; ell <= opts.ell_max; ++ell)
    for (std::int64_t j = opts.j_min; j <= opts.j_max; ++j)
      quads[std::size_t(ell)].push_back(build_cell_quadrature(
          params, CellIndex{ell, j}, opts, g.hx(), g.ht()));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick_sp(0, g.spatial_count() - 1);
  std::uniform_int_distribution<int> pick_t(0, g.m - 1);

  CsvTable samples_tab;
  samples_tab.columns = {"sample", "t",     "ell",  "theta", "m_eta",
                         "rho",    "delta", "rhs",  "ratio"};
  CsvTable cells_tab;
  cells_tab.name = "cells";
  cells_tab.columns = {"sample", "ell",       "j",
                       "delta_lj", "normalized", "abs_j_minus_rho"};

  const Real exp_theta = 1.0 / p - 1.0 / q;
  const Real exp_m = p / q;
  const Real exp_norm = 1.0 - p / q;
  const Real decay_bound =
      -0.5 * Real(params.n + 1) * std::min(params.alpha / Real(params.n), 1.0 / q);

  std::vector<Real> ratios;
  std::vector<Real> decay_x, decay_y;
  std::int64_t skipped_m = 0, skipped_theta = 0;

  for (int si = 0; si < sample_count; ++si) {
    std::int64_t idx[kMaxDim];
    const std::int64_t sp = pick_sp(rng);
    const int it = pick_t(rng);
    decode_spatial(g, sp, idx);
    Real x[kMaxDim];
    for (int d = 0; d < g.n; ++d) x[d] = g.x_coord(idx[d]);
    const Real t = g.t_coord(it);

    const std::vector<Real> theta = theta_profile_at(f, p, opts, x, t);
    const Real mv = maximal_at(f, grid, opts, x, t).averaged;
    if (!(mv > 0.0)) {
      ++skipped_m;
      continue;
    }
    for (int ell = 0; ell <= opts.ell_max; ++ell) {
      Real delta_ell = 0.0;
      std::vector<Real> delta_lj(quads[std::size_t(ell)].size());
      for (std::size_t jj = 0; jj < quads[std::size_t(ell)].size(); ++jj) {
        delta_lj[jj] = apply_quadrature_at(f, quads[std::size_t(ell)][jj], x, t);
        delta_ell += delta_lj[jj];
      }
      if (!(theta[std::size_t(ell)] > 0.0)) {
        if (delta_ell > 0.0) ++skipped_theta;
        continue;
      }
      const Real rhs = std::pow(theta[std::size_t(ell)], exp_theta) *
                       std::pow(mv, exp_m) * std::pow(norm, exp_norm);
      const Real ratio = delta_ell / rhs;
      const Real rho =
          solve_rho(theta[std::size_t(ell)], mv, norm, ell, params, p);
      ratios.push_back(ratio);
      samples_tab.rows.push_back({Real(si), t, Real(ell),
                                  theta[std::size_t(ell)], mv, rho, delta_ell,
                                  rhs, ratio});
      for (std::size_t jj = 0; jj < delta_lj.size(); ++jj) {
        if (!(delta_lj[jj] > 0.0)) continue;
        const Real j = Real(opts.j_min + std::int64_t(jj));
        const Real normalized = delta_lj[jj] / rhs;
        const Real dist = std::abs(j - rho);
        cells_tab.rows.push_back(
            {Real(si), Real(ell), j, delta_lj[jj], normalized, dist});
        decay_x.push_back(dist);
        decay_y.push_back(std::log2(normalized));
      }
    }
  }

  ExperimentReport rep;
  rep.experiment = "hedberg";
  rep.params = {{"kernel", {{"n", params.n}, {"alpha", params.alpha}}},
                {"p", p},
                {"q", q},
                {"grid", grid_json(g)},
                {"window", window_json(opts)},
                {"samples", sample_count},
                {"seed", seed}};
  rep.metrics["max_ratio"] =
      ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end());
  rep.metrics["ratio_p50"] = percentile(ratios, 0.5);
  rep.metrics["ratio_p90"] = percentile(ratios, 0.9);
  rep.metrics["skipped_m_zero"] = Real(skipped_m);
  rep.metrics["skipped_theta_zero"] = Real(skipped_theta);
  rep.metrics["decay_points"] = Real(decay_x.size());
  rep.metrics["decay_slope_bound"] = decay_bound;
  if (decay_x.size() >= 2) {
    const LineFit fit = fit_line(decay_x, decay_y);
    rep.metrics["decay_slope"] = fit.slope;
    rep.flags["decay_slope_ok"] = fit.slope <= decay_bound;
  } else {
    rep.metrics["decay_slope"] = 0.0;
    rep.flags["decay_slope_ok"] = false;
  }
  rep.flags["ratios_finite"] = true;
  for (Real r : ratios)
    if (!std::isfinite(r)) rep.flags["ratios_finite"] = false;
  rep.tables.push_back(std::move(samples_tab));
  rep.tables.push_back(std::move(cells_tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

ExperimentReport theta_sum_check(const SampledField& f,
                                 const KernelParams& params, Real p,
                                 const QuadratureOptions& opts) {
  Stopwatch timer;
  params.validate();
  const SampledField sum = theta_sum_field(f, p, opts);
  const GridSpec& g = f.spec;

  Real max_sum = 0.0;
  std::int64_t argmax = 0;
  for (std::int64_t i = 0; i < sum.values.size(); ++i)
    if (sum.values[i] > max_sum) {
      max_sum = sum.values[i];
      argmax = i;
    }

  CsvTable tab;
  tab.columns = {"time_index", "t", "max_theta_sum"};
  for (int it = 0; it < g.m; ++it) {
    Real slice_max = 0.0;
    for (std::int64_t sp = 0; sp < g.spatial_count(); ++sp)
      slice_max = std::max(slice_max, sum.values[sp * g.m + it]);
    tab.rows.push_back({Real(it), g.t_coord(it), slice_max});
  }

  ExperimentReport rep;
  rep.experiment = "theta-sum";
  rep.params = {{"kernel", {{"n", params.n}, {"alpha", params.alpha}}},
                {"p", p},
                {"grid", grid_json(g)},
                {"window", window_json(opts)}};
  rep.metrics["max_theta_sum"] = max_sum;
  rep.metrics["argmax_time_index"] = Real(argmax % g.m);
  rep.flags["theta_sum_le_one"] = max_sum <= 1.0 + 1e-6;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

ExperimentReport ortho_decay(const SampledField& f, const KernelParams& params,
                             Real p, const OrthoConfig& cfg,
                             const QuadratureOptions& opts) {
  Stopwatch timer;
  params.validate();
  cfg.validate();
  opts.validate();
  if (cfg.h_max > opts.ell_max)
    throw std::invalid_argument(
        "ortho_decay: window too small for the requested h range");
  ExponentPair ep{p, Real(cfg.q_int)};
  if (!ep.on_line(params.alpha, params.n))
    throw std::invalid_argument(
        "ortho_decay: exponents must satisfy alpha/n = 1/p - 1/q_int");

  std::vector<SampledField> parts;
  parts.reserve(std::size_t(opts.ell_max) + 1);
  for (int ell = 0; ell <= opts.ell_max; ++ell)
    parts.push_back(apply_partial(f, params, ell, opts));

  const Real vol = f.spec.cell_volume();
  CsvTable tab;
  tab.columns = {"h", "J", "log2_J"};
  std::vector<Real> hx, hy;
  bool all_positive = true;
  Real J0 = 0.0, J_end = 0.0;
  for (int h = 0; h <= cfg.h_max; ++h) {
    Real J = 0.0;
    for (int ell = h; ell <= opts.ell_max; ++ell) {
      const Array& a = parts[std::size_t(ell)].values;
      const Array& b = parts[std::size_t(ell - h)].values;
      Real acc = 0.0;
      for (std::int64_t i = 0; i < a.size(); ++i)
        acc += a[i] * int_pow(b[i], cfg.q_int - 1);
      J += acc;
    }
    J *= vol;
    if (h == 0) J0 = J;
    if (h == cfg.h_max) J_end = J;
    const Real l2 = J > 0.0 ? std::log2(J) : 0.0;
    tab.rows.push_back({Real(h), J, l2});
    if (J > 0.0) {
      hx.push_back(Real(h));
      hy.push_back(l2);
    } else {
      all_positive = false;
    }
  }

  ExperimentReport rep;
  rep.experiment = "ortho-decay";
  rep.params = {{"kernel", {{"n", params.n}, {"alpha", params.alpha}}},
                {"p", p},
                {"q_int", cfg.q_int},
                {"h_max", cfg.h_max},
                {"grid", grid_json(f.spec)},
                {"window", window_json(opts)}};
  const Real reference =
      (1.0 / 3.0) * std::min(params.alpha / Real(params.n), 1.0 / Real(cfg.q_int));
  Real eps_fit = 0.0;
  if (hx.size() >= 2) eps_fit = -fit_line(hx, hy).slope;
  rep.metrics["eps_fit"] = eps_fit;
  rep.metrics["reference_rate"] = reference;
  rep.metrics["J_0"] = J0;
  rep.metrics["J_hmax"] = J_end;
  rep.flags["J_finite"] = std::isfinite(J0) && std::isfinite(J_end);
  rep.flags["J_positive"] = all_positive;
  rep.flags["eps_positive"] = eps_fit > 0.0;
  rep.flags["J_end_le_J0"] = J_end <= J0;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

void validate_intersection_indices(int ell, int h, std::int64_t j,
                                   std::int64_t k) {
  if (ell < 0 || h < 0 || ell - h < 0)
    throw std::invalid_argument(
        "intersection indices: need ell >= h >= 0");
  if (!(j - h < k - 2 && k - 2 < j - 2))
    throw std::invalid_argument(
        "intersection indices: need j - h < k - 2 < j - 2");
  const std::int64_t r = j - k + ell - h;
  if (!(r >= 0 && r < ell - 2))
    throw std::invalid_argument(
        "intersection indices: need 0 <= j - k + ell - h < ell - 2");
}

ExperimentReport intersection_bound_check(int n, int num_configs,
                                          std::int64_t samples,
                                          std::uint64_t seed, int q_int) {
  Stopwatch timer;
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("intersection_bound_check: n must lie in [1, 3]");
  if (num_configs < 1)
    throw std::invalid_argument("intersection_bound_check: need >= 1 config");
  if (q_int < 2)
    throw std::invalid_argument("intersection_bound_check: q_int must be >= 2");

  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_int_distribution<int> pick_ell(5, 8);
  std::uniform_int_distribution<int> pick_j(-1, 1);
  std::uniform_real_distribution<Real> unif(0.0, 1.0);

  CsvTable tab;
  tab.columns = {"config", "ell",       "h",         "j",        "k",
                 "r",      "lhs",       "lhs_sigma", "rhs",      "rhs_sigma",
                 "ratio",  "ratio_sigma", "signal",  "analytic_volume"};

  std::vector<Real> ratios, ratio_sigmas;
  int signal_configs = 0;
  int volume_violations = 0;

  for (int cfg = 0; cfg < num_configs; ++cfg) {
    const int ell = pick_ell(rng);
    std::uniform_int_distribution<int> pick_h(4, std::min(ell, 7));
    const int h = pick_h(rng);
    const std::int64_t j = pick_j(rng);
    std::uniform_int_distribution<std::int64_t> pick_k(j - h + 3, j - 1);
    std::vector<std::int64_t> ks(std::size_t(q_int - 1));
    for (auto& k : ks) k = pick_k(rng);
    const std::int64_t k_min = *std::min_element(ks.begin(), ks.end());
    validate_intersection_indices(ell, h, j, k_min);
    const int r = static_cast<int>(j - k_min + ell - h);

    // centers within 2^{j+2} of the first one
    const Real scale0 = std::ldexp(1.0, static_cast<int>(j));
    const Real max_sep = std::ldexp(1.0, static_cast<int>(j) + 2);
    SpaceTimePoint c0 = SpaceTimePoint::origin(n);
    for (int d = 0; d < n; ++d) c0.x[d] = scale0 * (2.0 * unif(rng) - 1.0);
    c0.t = scale0 * (2.0 * unif(rng) - 1.0);
    std::vector<SpaceTimePoint> ci(ks.size(), SpaceTimePoint::origin(n));
    for (auto& c : ci) {
      Real norm2;
      Real off[kMaxDim + 1];
      do {
        norm2 = 0.0;
        for (int d = 0; d <= n; ++d) {
          off[d] = max_sep * (2.0 * unif(rng) - 1.0);
          norm2 += off[d] * off[d];
        }
      } while (norm2 > max_sep * max_sep);
      for (int d = 0; d < n; ++d) c.x[d] = c0.x[d] + off[d];
      c.t = c0.t + off[n];
    }

    const CellIndex lead{ell, j};
    auto lhs_pred = [&](const ConePoint& p) {
      if (!cell_contains(lead, c0, p)) return false;
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (!cell_contains(CellIndex{ell - h, ks[i]}, ci[i], p)) return false;
      return true;
    };
    const StarCell lead_star{CellIndex{r, j}, c0};
    auto rhs_pred = [&](const ConePoint& p) {
      if (!star_contains(lead_star, p)) return false;
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (!star_contains(StarCell{CellIndex{ell - h, ks[i]}, ci[i]}, p))
          return false;
      return true;
    };

    const McEstimate lhs =
        mc_measure(lhs_pred, cell_bounding_box(n, lead, c0), samples,
                   stream_seed(seed, 2 * std::uint64_t(cfg)));
    const McEstimate star =
        mc_measure(rhs_pred, star_bounding_box(n, CellIndex{r, j}, c0), samples,
                   stream_seed(seed, 2 * std::uint64_t(cfg) + 1));
    const Real scale = std::ldexp(1.0, static_cast<int>(j - k_min - h));
    const Real rhs = scale * star.estimate;
    const Real rhs_sigma = scale * star.std_error;

    const bool signal = rhs > 3.0 * rhs_sigma && rhs > 0.0;
    Real ratio = 0.0, ratio_sigma = 0.0;
    if (signal) {
      ratio = lhs.estimate / rhs;
      if (lhs.estimate > 0.0)
        ratio_sigma =
            ratio * std::sqrt(std::pow(lhs.std_error / lhs.estimate, 2) +
                              std::pow(rhs_sigma / rhs, 2));
      else
        ratio_sigma = lhs.std_error / rhs;
      ratios.push_back(ratio);
      ratio_sigmas.push_back(ratio_sigma);
      ++signal_configs;
    }

    const Real vol = cell_volume(n, lead);
    if (lhs.estimate > vol + 3.0 * lhs.std_error) ++volume_violations;

    tab.rows.push_back({Real(cfg), Real(ell), Real(h), Real(j), Real(k_min),
                        Real(r), lhs.estimate, lhs.std_error, rhs, rhs_sigma,
                        ratio, ratio_sigma, signal ? 1.0 : 0.0, vol});
  }

  Real c_max = 0.0;
  for (Real r : ratios) c_max = std::max(c_max, r);
  int ratio_violations = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i)
    if (ratios[i] > c_max + 3.0 * ratio_sigmas[i]) ++ratio_violations;

  ExperimentReport rep;
  rep.experiment = "intersection-bound";
  rep.params = {{"n", n},
                {"configs", num_configs},
                {"samples", samples},
                {"seed", seed},
                {"q_int", q_int}};
  rep.metrics["fitted_c_max"] = c_max;
  rep.metrics["signal_configs"] = Real(signal_configs);
  rep.metrics["ratio_violations"] = Real(ratio_violations);
  rep.metrics["volume_violations"] = Real(volume_violations);
  rep.flags["no_ratio_violations"] = ratio_violations == 0;
  rep.flags["lhs_within_cell_volume"] = volume_violations == 0;
  rep.flags["has_signal"] = signal_configs > 0;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

ExperimentReport cell_volume_check(int n, int num_cells, std::int64_t samples,
                                   std::uint64_t seed) {
  Stopwatch timer;
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("cell_volume_check: n must lie in [1, 3]");
  if (num_cells < 1)
    throw std::invalid_argument("cell_volume_check: need >= 1 cell");

  std::mt19937_64 rng(splitmix64(seed) ^ 0xc0ffee);
  std::uniform_int_distribution<int> pick_ell(0, 6);
  std::uniform_int_distribution<int> pick_j(-3, 3);

  CsvTable tab;
  tab.columns = {"cell", "ell", "j", "analytic", "mc", "mc_sigma", "z"};
  Real max_z = 0.0;
  const SpaceTimePoint origin = SpaceTimePoint::origin(n);
  for (int i = 0; i < num_cells; ++i) {
    const CellIndex cell{pick_ell(rng), pick_j(rng)};
    const Real analytic = cell_volume(n, cell);
    auto pred = [&](const ConePoint& p) {
      return cell_contains(cell, origin, p);
    };
    const McEstimate mc = mc_measure(pred, cell_bounding_box(n, cell, origin),
                                     samples, stream_seed(seed, std::uint64_t(i)));
    const Real z = std::abs(mc.estimate - analytic) /
                   std::max(mc.std_error, Real(1e-300));
    max_z = std::max(max_z, z);
    tab.rows.push_back({Real(i), Real(cell.ell), Real(cell.j), analytic,
                        mc.estimate, mc.std_error, z});
  }

  ExperimentReport rep;
  rep.experiment = "cell-volume";
  rep.params = {
      {"n", n}, {"cells", num_cells}, {"samples", samples}, {"seed", seed}};
  rep.metrics["max_z"] = max_z;
  rep.flags["within_3_sigma"] = max_z <= 3.0;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

ExperimentReport norm_ratio_survey(
    const std::vector<std::pair<std::string, SampledField>>& fields,
    const KernelParams& params, Real p, Real q, QuadratureOptions base) {
  Stopwatch timer;
  params.validate();
  ExponentPair ep{p, q};
  if (!ep.on_line(params.alpha, params.n))
    throw std::invalid_argument(
        "norm_ratio_survey: exponents must satisfy alpha/n = 1/p - 1/q");
  if (fields.empty())
    throw std::invalid_argument("norm_ratio_survey: no fields given");

  CsvTable tab;
  tab.columns = {"field", "m", "norm_p", "norm_q_If", "ratio"};

  auto ratio_of = [&](const SampledField& f) {
    const QuadratureOptions opts = auto_window(f, base);
    const SampledField If = apply_full(f, params, opts);
    const Real np = lp_norm(f, p);
    if (!(np > 0.0))
      throw std::invalid_argument("norm_ratio_survey: degenerate field");
    return std::array<Real, 3>{np, lp_norm(If, q), lp_norm(If, q) / np};
  };

  Real rmax = 0.0;
  Real rmin = std::numeric_limits<Real>::infinity();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto vals = ratio_of(fields[i].second);
    tab.rows.push_back({Real(i), Real(fields[i].second.spec.m), vals[0],
                        vals[1], vals[2]});
    rmax = std::max(rmax, vals[2]);
    rmin = std::min(rmin, vals[2]);
    names.push_back(fields[i].first);
  }

  // invariance checks on the first field
  const SampledField& f0 = fields.front().second;
  const Real r0 = ratio_of(f0)[2];
  const Real r_dil = ratio_of(dilate(f0, 2.0))[2];
  SampledField f_scaled = f0;
  f_scaled.values *= 3.0;
  const Real r_scaled = ratio_of(f_scaled)[2];
  const Real dil_drift = std::abs(r_dil / r0 - 1.0);
  const Real scal_drift = std::abs(r_scaled / r0 - 1.0);

  ExperimentReport rep;
  rep.experiment = "survey";
  rep.params = {{"kernel", {{"n", params.n}, {"alpha", params.alpha}}},
                {"p", p},
                {"q", q},
                {"fields", names}};
  rep.metrics["max_ratio"] = rmax;
  rep.metrics["min_ratio"] = rmin;
  rep.metrics["dilation_ratio_drift"] = dil_drift;
  rep.metrics["scalar_ratio_drift"] = scal_drift;
  rep.flags["ratios_finite"] = std::isfinite(rmax) && std::isfinite(rmin);
  rep.flags["dilation_invariant"] = dil_drift <= 0.05;
  rep.flags["scalar_invariant"] = scal_drift <= 1e-12;
  rep.tables.push_back(std::move(tab));
  rep.runtime_s = timer.seconds();
  rep.validate();
  return rep;
}

}  // namespace lightcone
