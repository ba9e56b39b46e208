#include "lightcone/maximal.hpp"

#include "lightcone/parallel.hpp"

#include <limits>

namespace lightcone {

namespace {

bool in_window(const QuadratureOptions& opts, Real u, Real v,
               int* ell_out = nullptr, std::int64_t* j_out = nullptr) {
  if (!(v > 0.0)) return false;
  const int j = std::ilogb(u);
  if (j < opts.j_min || j > opts.j_max) return false;
  const int ell = j - std::ilogb(v);
  if (ell < 0 || ell > opts.ell_max) return false;
  if (ell_out) *ell_out = ell;
  if (j_out) *j_out = j;
  return true;
}

Real checked_norm_p(const SampledField& f, Real p) {
  const Real norm = lp_norm(f, p);
  if (!(norm > 0.0))
    throw std::invalid_argument(
        "theta: the zero field has no normalized cell mass");
  return norm;
}

}  // namespace

std::vector<Real> theta_profile_at(const SampledField& f, Real p,
                                   const QuadratureOptions& opts,
                                   const Real* x, Real t) {
  opts.validate();
  const Real norm = checked_norm_p(f, p);
  const GridSpec& g = f.spec;
  std::vector<Real> acc(std::size_t(opts.ell_max) + 1, 0.0);

  const std::int64_t spn = g.spatial_count();
  std::int64_t idx[kMaxDim];
  for (std::int64_t sp = 0; sp < spn; ++sp) {
    decode_spatial(g, sp, idx);
    Real r2 = 0.0;
    for (int d = 0; d < g.n; ++d) {
      const Real dy = x[d] - g.x_coord(idx[d]);
      r2 += dy * dy;
    }
    const Real rr = std::sqrt(r2);
    const Real* col = f.values.data() + sp * g.m;
    for (int it = 0; it < g.m; ++it) {
      if (col[it] == 0.0) continue;
      const Real dt = std::abs(t - g.t_coord(it));
      int ell;
      if (in_window(opts, dt + rr, dt - rr, &ell))
        acc[std::size_t(ell)] += std::pow(col[it], p);
    }
  }
  const Real scale = g.cell_volume() / std::pow(norm, p);
  for (Real& a : acc) a *= scale;
  return acc;
}

SampledField theta_field(const SampledField& f, Real p, int ell,
                         const QuadratureOptions& opts) {
  opts.validate();
  if (ell < 0 || ell > opts.ell_max)
    throw std::invalid_argument("theta_field: ell outside [0, ell_max]");
  const Real norm = checked_norm_p(f, p);
  const GridSpec& g = f.spec;
  const Array fp = f.values.pow(p);
  SampledField out = zero_field(g);
  const Real scale = g.cell_volume() / std::pow(norm, p);

  const std::int64_t spn = g.spatial_count();
  parallel_for(spn, [&](std::int64_t osp) {
    std::int64_t oidx[kMaxDim], jidx[kMaxDim];
    decode_spatial(g, osp, oidx);
    Real* row = out.values.data() + osp * g.m;
    for (std::int64_t jsp = 0; jsp < spn; ++jsp) {
      decode_spatial(g, jsp, jidx);
      Real r2 = 0.0;
      for (int d = 0; d < g.n; ++d) {
        const Real dy = g.x_coord(oidx[d]) - g.x_coord(jidx[d]);
        r2 += dy * dy;
      }
      const Real rr = std::sqrt(r2);
      const Real* col = fp.data() + jsp * g.m;
      for (int ot = 0; ot < g.m; ++ot) {
        for (int jt = 0; jt < g.m; ++jt) {
          if (col[jt] == 0.0) continue;
          const Real dt = std::abs(g.t_coord(ot) - g.t_coord(jt));
          int cell_ell;
          if (in_window(opts, dt + rr, dt - rr, &cell_ell) && cell_ell == ell)
            row[ot] += col[jt];
        }
      }
    }
    for (int ot = 0; ot < g.m; ++ot) row[ot] *= scale;
  });
  return out;
}

SampledField theta_sum_field(const SampledField& f, Real p,
                             const QuadratureOptions& opts) {
  opts.validate();
  const Real norm = checked_norm_p(f, p);
  const GridSpec& g = f.spec;
  const int m = g.m;
  const Array fp = f.values.pow(p);

  // Classification table over (squared spatial index offset, |time index
  // offset|).  Spatial offsets are exact multiples of hx, so u and v here
  // are bit-identical to the per-point computation.
  const std::int64_t qmax = std::int64_t(g.n) * (m - 1) * (m - 1);
  std::vector<Real> table(std::size_t(qmax + 1) * m);
  parallel_for(qmax + 1, [&](std::int64_t q) {
    const Real rr = g.hx() * std::sqrt(Real(q));
    Real* row = table.data() + std::size_t(q) * m;
    for (int tau = 0; tau < m; ++tau) {
      const Real dt = g.ht() * Real(tau);
      row[tau] = in_window(opts, dt + rr, dt - rr) ? 1.0 : 0.0;
    }
  });

  SampledField out = zero_field(g);
  const Real scale = g.cell_volume() / std::pow(norm, p);
  const std::int64_t spn = g.spatial_count();

  parallel_for(spn, [&](std::int64_t osp) {
    std::int64_t oidx[kMaxDim], jidx[kMaxDim];
    decode_spatial(g, osp, oidx);
    Real* row_out = out.values.data() + osp * m;
    for (std::int64_t jsp = 0; jsp < spn; ++jsp) {
      decode_spatial(g, jsp, jidx);
      std::int64_t q = 0;
      for (int d = 0; d < g.n; ++d) {
        const std::int64_t di = oidx[d] - jidx[d];
        q += di * di;
      }
      const Real* trow = table.data() + std::size_t(q) * m;
      const Real* col = fp.data() + jsp * m;
      for (int ot = 0; ot < m; ++ot) {
        Real acc = 0.0;
        for (int jt = 0; jt <= ot; ++jt) acc += col[jt] * trow[ot - jt];
        for (int jt = ot + 1; jt < m; ++jt) acc += col[jt] * trow[jt - ot];
        row_out[ot] += acc;
      }
    }
    for (int ot = 0; ot < m; ++ot) row_out[ot] *= scale;
  });
  return out;
}

ThetaProfile make_theta_profile(const SampledField& f, Real p,
                                const QuadratureOptions& opts) {
  ThetaProfile profile;
  profile.p = p;
  profile.norm_p = checked_norm_p(f, p);
  profile.theta.reserve(std::size_t(opts.ell_max) + 1);
  for (int ell = 0; ell <= opts.ell_max; ++ell)
    profile.theta.push_back(theta_field(f, p, ell, opts));
  return profile;
}

namespace {

// Per-point sums of f over Lambda_{ell j} cap Gamma^nu for every cell in
// the window and every requested sector.  nu_filter < 0 keeps all sectors.
struct SectorSums {
  int ell_count = 0;
  std::int64_t j_count = 0;
  int nu_count = 0;
  std::vector<Real> sums;  // [ell][j][nu]

  Real& at(int ell, std::int64_t jof, int nu) {
    return sums[(std::size_t(ell) * j_count + std::size_t(jof)) * nu_count +
                std::size_t(nu)];
  }
};

SectorSums sector_sums_at(const SampledField& f, const SphereGrid& grid,
                          const QuadratureOptions& opts, const Real* x, Real t,
                          int nu_filter) {
  const GridSpec& g = f.spec;
  SectorSums s;
  s.ell_count = opts.ell_max + 1;
  s.j_count = opts.j_max - opts.j_min + 1;
  s.nu_count = nu_filter >= 0 ? 1 : grid.count();
  s.sums.assign(std::size_t(s.ell_count) * s.j_count * s.nu_count, 0.0);

  const Real chord = sector_aperture(grid.eta);
  const Real chord2 = chord * chord;
  const std::int64_t spn = g.spatial_count();
  std::int64_t idx[kMaxDim];
  Real dy[kMaxDim];
  for (std::int64_t sp = 0; sp < spn; ++sp) {
    decode_spatial(g, sp, idx);
    Real r2 = 0.0;
    for (int d = 0; d < g.n; ++d) {
      dy[d] = x[d] - g.x_coord(idx[d]);
      r2 += dy[d] * dy[d];
    }
    const Real rr = std::sqrt(r2);
    const Real* col = f.values.data() + sp * g.m;
    for (int it = 0; it < g.m; ++it) {
      if (col[it] == 0.0) continue;
      const Real dt = std::abs(t - g.t_coord(it));
      int ell;
      std::int64_t j;
      if (!in_window(opts, dt + rr, dt - rr, &ell, &j)) continue;
      if (!(rr > 0.0)) continue;  // direction undefined on the time axis
      const std::int64_t jof = j - opts.j_min;
      for (int nu = 0; nu < grid.count(); ++nu) {
        if (nu_filter >= 0 && nu != nu_filter) continue;
        Real dot = 0.0;
        for (int d = 0; d < g.n; ++d) dot += dy[d] * grid.directions(d, nu);
        if (2.0 - 2.0 * dot / rr <= chord2)
          s.at(ell, jof, nu_filter >= 0 ? 0 : nu) += col[it];
      }
    }
  }
  const Real vol = g.cell_volume();
  for (Real& v : s.sums) v *= vol;
  return s;
}

Real cell_normalizer(int n, int eta, int ell, std::int64_t j) {
  // 2^j 2^{j-ell} 2^{(j-eta)(n-1)}
  const int ji = static_cast<int>(j);
  return std::ldexp(1.0, ji) * std::ldexp(1.0, ji - ell) *
         std::ldexp(1.0, (ji - eta) * (n - 1));
}

void check_grid_matches(const SampledField& f, const SphereGrid& grid,
                        const QuadratureOptions& opts) {
  opts.validate();
  if (grid.n != f.spec.n)
    throw std::invalid_argument("maximal: sphere grid dimension mismatch");
  if (grid.eta != opts.ell_max)
    throw std::invalid_argument(
        "maximal: the grid eta must equal ell_max so the maximal operator, "
        "theta and the partial operators share one cell family");
}

}  // namespace

MaximalValues maximal_at(const SampledField& f, const SphereGrid& grid,
                         const QuadratureOptions& opts, const Real* x, Real t) {
  check_grid_matches(f, grid, opts);
  SectorSums s = sector_sums_at(f, grid, opts, x, t, -1);
  MaximalValues out;
  out.sector.assign(std::size_t(grid.count()), 0.0);
  for (int nu = 0; nu < grid.count(); ++nu) {
    Real best = 0.0;
    for (int ell = 0; ell <= opts.ell_max; ++ell)
      for (std::int64_t jof = 0; jof < s.j_count; ++jof) {
        const Real avg = s.at(ell, jof, nu) /
                         cell_normalizer(f.spec.n, grid.eta, ell,
                                         opts.j_min + jof);
        best = std::max(best, avg);
      }
    out.sector[std::size_t(nu)] = best;
  }
  Real total = 0.0;
  for (Real v : out.sector) total += v;
  out.averaged = std::ldexp(total, -grid.eta * (f.spec.n - 1));
  return out;
}

SampledField sector_maximal(const SampledField& f, const SphereGrid& grid,
                            int nu, const QuadratureOptions& opts) {
  check_grid_matches(f, grid, opts);
  if (nu < 0 || nu >= grid.count())
    throw std::invalid_argument("sector_maximal: direction index out of range");
  validate_field(f);
  const GridSpec& g = f.spec;
  SampledField out = zero_field(g);
  parallel_for(g.spatial_count(), [&](std::int64_t sp) {
    std::int64_t idx[kMaxDim];
    decode_spatial(g, sp, idx);
    Real x[kMaxDim];
    for (int d = 0; d < g.n; ++d) x[d] = g.x_coord(idx[d]);
    Real* row = out.values.data() + sp * g.m;
    for (int it = 0; it < g.m; ++it) {
      SectorSums s = sector_sums_at(f, grid, opts, x, g.t_coord(it), nu);
      Real best = 0.0;
      for (int ell = 0; ell <= opts.ell_max; ++ell)
        for (std::int64_t jof = 0; jof < s.j_count; ++jof)
          best = std::max(best, s.at(ell, jof, 0) /
                                    cell_normalizer(g.n, grid.eta, ell,
                                                    opts.j_min + jof));
      row[it] = best;
    }
  });
  return out;
}

SampledField averaged_maximal(const SampledField& f, const SphereGrid& grid,
                              const QuadratureOptions& opts) {
  check_grid_matches(f, grid, opts);
  validate_field(f);
  const GridSpec& g = f.spec;
  SampledField out = zero_field(g);
  parallel_for(g.spatial_count(), [&](std::int64_t sp) {
    std::int64_t idx[kMaxDim];
    decode_spatial(g, sp, idx);
    Real x[kMaxDim];
    for (int d = 0; d < g.n; ++d) x[d] = g.x_coord(idx[d]);
    Real* row = out.values.data() + sp * g.m;
    for (int it = 0; it < g.m; ++it)
      row[it] = maximal_at(f, grid, opts, x, g.t_coord(it)).averaged;
  });
  return out;
}

Real solve_rho(Real theta_val, Real m_val, Real norm_p, int ell,
               const KernelParams& params, Real p) {
  params.validate();
  if (!(theta_val > 0.0) || !(m_val > 0.0) || !(norm_p > 0.0))
    throw std::invalid_argument("solve_rho: inputs must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("solve_rho: p must exceed 1");
  const Real ratio = std::pow(theta_val, 1.0 / p) * norm_p / m_val;
  return (Real(ell) + p * std::log2(ratio)) / Real(params.n + 1);
}

RhoField make_rho_field(const ThetaProfile& profile, const SampledField& m_eta,
                        const KernelParams& params) {
  RhoField out;
  const Real nan = std::numeric_limits<Real>::quiet_NaN();
  out.rho.reserve(profile.theta.size());
  for (std::size_t ell = 0; ell < profile.theta.size(); ++ell) {
    const Array& th = profile.theta[ell].values;
    Array rho(th.size());
    for (std::int64_t i = 0; i < th.size(); ++i) {
      const Real mv = m_eta.values[i];
      rho[i] = (th[i] > 0.0 && mv > 0.0)
                   ? solve_rho(th[i], mv, profile.norm_p, int(ell), params,
                               profile.p)
                   : nan;
    }
    out.rho.push_back(std::move(rho));
  }
  return out;
}

}  // namespace lightcone
