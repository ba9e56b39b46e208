#include "lightcone/cone_operator.hpp"

#include "lightcone/parallel.hpp"

#include <array>
#include <cassert>

namespace lightcone {

Real kernel_eval(const KernelParams& params, const ConePoint& p) {
  params.validate();
  const Real u = p.u();
  const Real v = p.v();
  if (!(v > 0.0))
    throw std::domain_error("kernel_eval: point lies outside the open cone");
  return std::pow(u, -params.u_exponent()) * std::pow(v, -params.v_exponent());
}

QuadratureOptions auto_window(const SampledField& f, QuadratureOptions base,
                              int depth) {
  validate_field(f);
  const GridSpec& g = f.spec;

  // largest |t - s| and |x - y| between an output node and a support node
  Real t_sup = 0.0;
  Real r_sup = 0.0;
  std::int64_t idx[kMaxDim];
  const std::int64_t spn = g.spatial_count();
  bool any = false;
  for (std::int64_t sp = 0; sp < spn; ++sp) {
    const Real* col = f.values.data() + sp * g.m;
    Real col_max_t = -1.0;
    for (int it = 0; it < g.m; ++it)
      if (col[it] > 0.0) {
        any = true;
        col_max_t = std::max(col_max_t, std::abs(g.t_coord(it)));
      }
    if (col_max_t >= 0.0) {
      decode_spatial(g, sp, idx);
      Real r2 = 0.0;
      for (int d = 0; d < g.n; ++d) {
        const Real x = g.x_coord(idx[d]);
        r2 += x * x;
      }
      r_sup = std::max(r_sup, std::sqrt(r2));
      t_sup = std::max(t_sup, col_max_t);
    }
  }
  const Real r_box = std::sqrt(Real(g.n)) * (g.L - 0.5 * g.hx());
  const Real t_box = g.T - 0.5 * g.ht();
  const Real u_max = any ? (t_box + t_sup) + (r_box + r_sup)
                         : 2.0 * (t_box + r_box);

  base.j_max = std::ilogb(std::max(u_max, Real(1e-30)));
  base.j_min = base.j_max - depth;
  base.validate();
  return base;
}

namespace {

struct OmegaRule {
  std::vector<std::array<Real, kMaxDim>> dirs;
  Real weight = 1.0;  // equal weight per direction
};

OmegaRule omega_rule(int n, int count) {
  OmegaRule rule;
  if (n == 1) {
    rule.dirs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
    rule.weight = 1.0;  // counting measure on S^0
    return rule;
  }
  if (n == 2) {
    rule.dirs.resize(count);
    for (int k = 0; k < count; ++k) {
      const Real phi = 2.0 * M_PI * (Real(k) + 0.5) / Real(count);
      rule.dirs[k] = {std::cos(phi), std::sin(phi), 0.0};
    }
    rule.weight = 2.0 * M_PI / Real(count);
    return rule;
  }
  rule.dirs.resize(count);
  const Real golden = 0.6180339887498948482;
  for (int k = 0; k < count; ++k) {
    const Real z = 1.0 - (2.0 * Real(k) + 1.0) / Real(count);
    const Real r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Real phi = 2.0 * M_PI * std::fmod(Real(k) * golden, 1.0);
    rule.dirs[k] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  rule.weight = 4.0 * M_PI / Real(count);
  return rule;
}

int omega_count(const KernelParams& params, const QuadratureOptions& opts,
                Real rmax, Real hx) {
  if (params.n == 1) return 2;
  if (!opts.omega_auto) return opts.sub_omega;
  const Real arc = 0.5 * hx;
  std::int64_t need = opts.sub_omega;
  if (params.n == 2) {
    need = std::llround(std::ceil(2.0 * M_PI * rmax / arc));
  } else {
    need = std::llround(std::ceil(4.0 * M_PI * rmax * rmax / (arc * arc)));
  }
  need = std::clamp<std::int64_t>(need, opts.sub_omega, opts.omega_cap);
  return static_cast<int>(need);
}

// Area fraction and centroid of the rectangle clipped to {v <= u}.
struct ClipResult {
  Real frac = 0.0;
  Real uc = 0.0;
  Real vc = 0.0;
};

ClipResult clip_below_diagonal(Real u1, Real u2, Real v1, Real v2) {
  struct Pt {
    Real u, v;
  };
  const Pt corners[4] = {{u1, v1}, {u2, v1}, {u2, v2}, {u1, v2}};
  Pt poly[8];
  int cnt = 0;
  auto inside = [](const Pt& p) { return p.v <= p.u; };
  for (int e = 0; e < 4; ++e) {
    const Pt& a = corners[e];
    const Pt& b = corners[(e + 1) % 4];
    const bool ia = inside(a), ib = inside(b);
    if (ia) poly[cnt++] = a;
    if (ia != ib) {
      // intersection with the line v = u along the segment a-b
      const Real fa = a.v - a.u;
      const Real fb = b.v - b.u;
      const Real t = fa / (fa - fb);
      poly[cnt++] = {a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)};
    }
  }
  ClipResult res;
  if (cnt < 3) return res;
  Real area2 = 0.0, cu = 0.0, cv = 0.0;
  for (int i = 0; i < cnt; ++i) {
    const Pt& a = poly[i];
    const Pt& b = poly[(i + 1) % cnt];
    const Real cross = a.u * b.v - b.u * a.v;
    area2 += cross;
    cu += (a.u + b.u) * cross;
    cv += (a.v + b.v) * cross;
  }
  if (area2 == 0.0) return res;
  res.frac = std::abs(area2 / 2.0) / ((u2 - u1) * (v2 - v1));
  res.uc = cu / (3.0 * area2);
  res.vc = cv / (3.0 * area2);
  return res;
}

}  // namespace

CellQuadrature build_cell_quadrature(const KernelParams& params,
                                     const CellIndex& cell,
                                     const QuadratureOptions& opts, Real hx,
                                     Real ht) {
  params.validate();
  opts.validate();
  (void)ht;
  const int j = static_cast<int>(cell.j);
  const Real U1 = std::ldexp(1.0, j);
  const Real U2 = std::ldexp(1.0, j + 1);
  const Real V1 = std::ldexp(1.0, j - cell.ell);
  const Real V2 = std::ldexp(1.0, j - cell.ell + 1);

  const Real rmax = 0.5 * (U2 - V1);
  const OmegaRule om = omega_rule(params.n, omega_count(params, opts, rmax, hx));

  const Real gv = params.alpha / Real(params.n);  // v-weight is v^{gv - 1}
  auto v_primitive = [&](Real v) { return std::pow(v, gv) / gv; };

  CellQuadrature quad;
  quad.cell = cell;
  quad.nodes.reserve(std::size_t(opts.sub_u) * opts.sub_v * om.dirs.size() * 2);

  auto emit_rect = [&](Real u1, Real u2, Real v1, Real v2, bool clipped) {
    ClipResult cl;
    if (clipped) {
      cl = clip_below_diagonal(u1, u2, v1, v2);
      if (!(cl.frac > 0.0)) return;
    } else {
      cl.frac = 1.0;
      cl.uc = 0.5 * (u1 + u2);
      cl.vc = 0.5 * (v1 + v2);
    }
    const Real wv = opts.v_weight_exact
                        ? v_primitive(v2) - v_primitive(v1)
                        : std::pow(cl.vc, gv - 1.0) * (v2 - v1);
    const Real wu = std::pow(cl.uc, -params.u_exponent()) * (u2 - u1);
    const Real r = 0.5 * (cl.uc - cl.vc);
    const Real smag = 0.5 * (cl.uc + cl.vc);
    const Real base_w =
        0.5 * wu * wv * cl.frac * std::pow(r, params.n - 1) * om.weight;
    if (!(base_w > 0.0)) return;
    for (const auto& dir : om.dirs) {
      for (Real sign : {1.0, -1.0}) {
        QuadNode node;
        for (int d = 0; d < params.n; ++d) node.dy[d] = r * dir[d];
        for (int d = params.n; d < kMaxDim; ++d) node.dy[d] = 0.0;
        node.ds = sign * smag;
        node.w = base_w;
        quad.nodes.push_back(node);
      }
    }
  };

  // Recursive bisection against the diagonal; only ell = 0 boxes touch it.
  auto refine = [&](auto&& self, Real u1, Real u2, Real v1, Real v2,
                    int depth) -> void {
    if (v1 >= u2) return;  // entirely above the diagonal: no cone points
    if (v2 <= u1) {
      emit_rect(u1, u2, v1, v2, false);
      return;
    }
    if (depth == 0) {
      emit_rect(u1, u2, v1, v2, true);
      return;
    }
    const Real um = 0.5 * (u1 + u2);
    const Real vm = 0.5 * (v1 + v2);
    self(self, u1, um, v1, vm, depth - 1);
    self(self, um, u2, v1, vm, depth - 1);
    self(self, u1, um, vm, v2, depth - 1);
    self(self, um, u2, vm, v2, depth - 1);
  };

  const Real du = (U2 - U1) / Real(opts.sub_u);
  const Real dv = (V2 - V1) / Real(opts.sub_v);
  for (int a = 0; a < opts.sub_u; ++a) {
    const Real u1 = U1 + Real(a) * du;
    const Real u2 = u1 + du;
    for (int b = 0; b < opts.sub_v; ++b) {
      const Real v1 = V1 + Real(b) * dv;
      const Real v2 = v1 + dv;
      if (cell.ell == 0)
        refine(refine, u1, u2, v1, v2, opts.diag_depth);
      else
        emit_rect(u1, u2, v1, v2, false);
    }
  }
  return quad;
}

Real apply_quadrature_at(const SampledField& f, const CellQuadrature& quad,
                         const Real* x, Real t) {
  const GridSpec& g = f.spec;
  const Real inv_hx = Real(g.m) / (2.0 * g.L);
  const Real inv_ht = Real(g.m) / (2.0 * g.T);
  const Real* data = f.values.data();
  const int m = g.m;
  Real acc = 0.0;
  for (const QuadNode& nd : quad.nodes) {
    std::int64_t sp = 0;
    bool in = true;
    for (int d = 0; d < g.n; ++d) {
      const Real pos = (x[d] - nd.dy[d] + g.L) * inv_hx;
      if (!(pos >= 0.0) || pos >= Real(m)) {
        in = false;
        break;
      }
      sp = sp * m + std::int64_t(pos);
    }
    if (!in) continue;
    const Real post = (t - nd.ds + g.T) * inv_ht;
    if (!(post >= 0.0) || post >= Real(m)) continue;
    acc += nd.w * data[sp * m + std::int64_t(post)];
  }
  return acc;
}

namespace {

void check_cell_in_window(const CellIndex& cell, const QuadratureOptions& opts) {
  if (cell.j < opts.j_min || cell.j > opts.j_max)
    throw std::invalid_argument("apply: cell j outside the truncation window");
  if (cell.ell < 0 || cell.ell > opts.ell_max)
    throw std::invalid_argument("apply: cell ell outside [0, ell_max]");
}

// Worst-case fraction of the f-mass that falls outside the truncated cone,
// probed from the box center and corners.
Real window_tail(const SampledField& f, const QuadratureOptions& opts) {
  const GridSpec& g = f.spec;
  const Real total = f.values.sum();
  if (!(total > 0.0)) return 0.0;

  std::vector<std::array<Real, kMaxDim + 1>> probes;
  probes.push_back({});  // origin
  const int corners = 1 << (g.n + 1);
  for (int c = 0; c < corners; ++c) {
    std::array<Real, kMaxDim + 1> p{};
    for (int d = 0; d < g.n; ++d)
      p[d] = ((c >> d) & 1) ? g.L - 0.5 * g.hx() : -(g.L - 0.5 * g.hx());
    p[g.n] = ((c >> g.n) & 1) ? g.T - 0.5 * g.ht() : -(g.T - 0.5 * g.ht());
    probes.push_back(p);
  }

  Real worst = 0.0;
  const std::int64_t spn = g.spatial_count();
  std::int64_t idx[kMaxDim];
  ConePoint cp;
  cp.y.resize(g.n);
  for (const auto& probe : probes) {
    // mass the untruncated operator would see vs mass inside the window;
    // mass outside the open cone is invisible either way
    Real in_cone = 0.0;
    Real in_window = 0.0;
    for (std::int64_t sp = 0; sp < spn; ++sp) {
      decode_spatial(g, sp, idx);
      for (int d = 0; d < g.n; ++d) cp.y[d] = probe[d] - g.x_coord(idx[d]);
      const Real* col = f.values.data() + sp * g.m;
      for (int it = 0; it < g.m; ++it) {
        if (col[it] == 0.0) continue;
        cp.s = probe[g.n] - g.t_coord(it);
        const auto cell = classify(cp);
        if (!cell) continue;
        in_cone += col[it];
        if (cell->ell <= opts.ell_max && cell->j >= opts.j_min &&
            cell->j <= opts.j_max)
          in_window += col[it];
      }
    }
    if (in_cone > 0.0) worst = std::max(worst, 1.0 - in_window / in_cone);
  }
  return worst;
}

}  // namespace

SampledField apply_cell(const SampledField& f, const KernelParams& params,
                        const CellIndex& cell, const QuadratureOptions& opts,
                        OperatorDiagnostics* diag) {
  validate_field(f);
  params.validate();
  opts.validate();
  check_cell_in_window(cell, opts);
  if (params.n != f.spec.n)
    throw std::invalid_argument("apply: kernel dimension differs from grid");
  if (diag &&
      std::ldexp(1.0, static_cast<int>(cell.j) - cell.ell) <
          std::max(f.spec.hx(), f.spec.ht()))
    ++diag->coarse_cells;

  const CellQuadrature quad =
      build_cell_quadrature(params, cell, opts, f.spec.hx(), f.spec.ht());

  SampledField out = zero_field(f.spec);
  const GridSpec& g = f.spec;
  const std::int64_t spn = g.spatial_count();
  parallel_for(spn, [&](std::int64_t sp) {
    std::int64_t idx[kMaxDim];
    decode_spatial(g, sp, idx);
    Real x[kMaxDim];
    for (int d = 0; d < g.n; ++d) x[d] = g.x_coord(idx[d]);
    Real* row = out.values.data() + sp * g.m;
    for (int it = 0; it < g.m; ++it)
      row[it] = apply_quadrature_at(f, quad, x, g.t_coord(it));
  });
  return out;
}

SampledField apply_partial(const SampledField& f, const KernelParams& params,
                           int ell, const QuadratureOptions& opts,
                           OperatorDiagnostics* diag) {
  opts.validate();
  if (ell < 0 || ell > opts.ell_max)
    throw std::invalid_argument("apply_partial: ell outside [0, ell_max]");
  SampledField out = zero_field(f.spec);
  for (std::int64_t j = opts.j_min; j <= opts.j_max; ++j)
    out.values += apply_cell(f, params, CellIndex{ell, j}, opts, diag).values;
  if (diag) diag->window_tail_fraction = window_tail(f, opts);
  return out;
}

SampledField apply_full(const SampledField& f, const KernelParams& params,
                        const QuadratureOptions& opts,
                        OperatorDiagnostics* diag) {
  opts.validate();
  SampledField out = zero_field(f.spec);
  for (int ell = 0; ell <= opts.ell_max; ++ell)
    out.values += apply_partial(f, params, ell, opts, nullptr).values;
  if (diag) {
    // recount coarse cells over the whole window once
    for (int ell = 0; ell <= opts.ell_max; ++ell)
      for (std::int64_t j = opts.j_min; j <= opts.j_max; ++j)
        if (std::ldexp(1.0, static_cast<int>(j) - ell) <
            std::max(f.spec.hx(), f.spec.ht()))
          ++diag->coarse_cells;
    diag->window_tail_fraction = window_tail(f, opts);
  }
  return out;
}

Real apply_cell_at(const SampledField& f, const KernelParams& params,
                   const CellIndex& cell, const QuadratureOptions& opts,
                   const Real* x, Real t) {
  check_cell_in_window(cell, opts);
  const CellQuadrature quad =
      build_cell_quadrature(params, cell, opts, f.spec.hx(), f.spec.ht());
  return apply_quadrature_at(f, quad, x, t);
}

Real riesz_1d_at(const Line1d& f, Real alpha, Real x) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("riesz_1d: alpha must lie in (0, 1)");
  // primitive of |x - y|^{alpha-1} in y: sign(y - x) |y - x|^alpha / alpha
  auto primitive = [&](Real y) {
    const Real d = y - x;
    const Real mag = std::pow(std::abs(d), alpha) / alpha;
    return d >= 0.0 ? mag : -mag;
  };
  Real acc = 0.0;
  const Real half = 0.5 * f.h;
  for (std::int64_t k = 0; k < f.values.size(); ++k) {
    if (f.values[k] == 0.0) continue;
    const Real y = f.x0 + Real(k) * f.h;
    acc += f.values[k] * (primitive(y + half) - primitive(y - half));
  }
  return acc;
}

Line1d riesz_1d(const Line1d& f, Real alpha) {
  Line1d out;
  out.x0 = f.x0;
  out.h = f.h;
  out.values = Array::Zero(f.values.size());
  for (std::int64_t k = 0; k < f.values.size(); ++k)
    out.values[k] = riesz_1d_at(f, alpha, f.x0 + Real(k) * f.h);
  return out;
}

SampledField apply_n1_separable(const SampledField& f, Real alpha) {
  validate_field(f);
  if (f.spec.n != 1)
    throw std::invalid_argument("apply_n1_separable: requires n = 1");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("apply_n1_separable: alpha must lie in (0, 1)");
  const Real hx = f.spec.hx();
  const Real ht = f.spec.ht();
  if (std::abs(hx - ht) > 1e-12 * hx)
    throw std::invalid_argument(
        "apply_n1_separable: requires square cells (L == T)");

  const int m = f.spec.m;
  const Real h = hx;

  // Singular cell weights w_k = integral of |v|^{alpha-1} over
  // [(k-1/2) h, (k+1/2) h]; shared by both passes.
  const int kw = 2 * (m - 1);  // largest diagonal shift either pass needs
  std::vector<Real> w(2 * std::size_t(kw) + 1);
  {
    auto primitive = [&](Real v) {
      const Real mag = std::pow(std::abs(v), alpha) / alpha;
      return v >= 0.0 ? mag : -mag;
    };
    for (int k = -kw; k <= kw; ++k)
      w[std::size_t(k + kw)] =
          primitive((Real(k) + 0.5) * h) - primitive((Real(k) - 0.5) * h);
  }

  // The inner integral lives on the whole anti-diagonal band through the
  // support of f, not only on the box, so it is held on an extended index
  // range [-(m-1), 2m-2] per axis; the outer pass never reaches a nonzero
  // value beyond it.
  const int ext = m - 1;
  const int em = 3 * m - 2;
  const Real* in = f.values.data();

  // inner pass: H(x, t) = sum_k w_k f(x - k h, t + k h), the |v|-factor
  // along anti-diagonals of the grid (w in rotated coordinates)
  Array H = Array::Zero(std::int64_t(em) * em);
  parallel_for(std::int64_t(em) * em, [&](std::int64_t flat) {
    const int ix = static_cast<int>(flat / em) - ext;
    const int it = static_cast<int>(flat % em) - ext;
    Real acc = 0.0;
    const int klo = std::max(ix - (m - 1), -it);
    const int khi = std::min(ix, (m - 1) - it);
    for (int k = klo; k <= khi; ++k)
      acc += w[std::size_t(k + kw)] * in[std::int64_t(ix - k) * m + (it + k)];
    H[flat] = acc;
  });

  // outer pass: 2^{2 alpha - 1} sum_k w_k H(x - k h, t - k h), the
  // |u|-factor along main diagonals (z in rotated coordinates)
  const Real scale = std::pow(2.0, 2.0 * alpha - 1.0);
  SampledField out = zero_field(f.spec);
  parallel_for(std::int64_t(m) * m, [&](std::int64_t flat) {
    const int ix = static_cast<int>(flat / m);
    const int it = static_cast<int>(flat % m);
    Real acc = 0.0;
    const int klo = std::max(ix, it) - (2 * m - 2);
    const int khi = std::min(ix, it) + ext;
    for (int k = klo; k <= khi; ++k)
      acc += w[std::size_t(k + kw)] *
             H[std::int64_t(ix - k + ext) * em + (it - k + ext)];
    out.values[flat] = scale * acc;
  });
  return out;
}

}  // namespace lightcone
