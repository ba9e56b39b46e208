#ifndef LIGHTCONE_CONE_OPERATOR_HPP
#define LIGHTCONE_CONE_OPERATOR_HPP

#include "lightcone/cone_geometry.hpp"
#include "lightcone/field.hpp"
#include "lightcone/types.hpp"

#include <cstdint>
#include <vector>

namespace lightcone {

// Truncation window and per-cell quadrature resolution, shared by the
// operator, the theta masses and the maximal operators so all three refer
// to the same cell family.
struct QuadratureOptions {
  std::int64_t j_min = 1;  // invalid until set; see auto_window
  std::int64_t j_max = 0;
  int ell_max = 12;  // eccentricity cutoff eta

  int sub_u = 4;
  int sub_v = 4;
  int sub_omega = 16;
  bool v_weight_exact = true;  // integrate the v-power analytically per slab

  // refine the angular rule so the arc between nodes stays below half a
  // grid cell (large cells would otherwise alias narrow fields)
  bool omega_auto = true;
  int omega_cap = 384;

  // recursive bisection depth against the diagonal v = u for ell = 0 cells
  int diag_depth = 6;

  bool window_valid() const { return j_min <= j_max; }

  void validate() const {
    if (!window_valid())
      throw std::invalid_argument("QuadratureOptions: j_min must be <= j_max");
    if (ell_max < 0)
      throw std::invalid_argument("QuadratureOptions: ell_max must be >= 0");
    if (sub_u < 1 || sub_v < 1 || sub_omega < 1)
      throw std::invalid_argument(
          "QuadratureOptions: subdivision counts must be >= 1");
  }
};

// Fills the dyadic window from the field: j_max covers the largest
// attainable u between an output node and a support node, and the window
// spans `depth` octaves below it.
QuadratureOptions auto_window(const SampledField& f,
                              QuadratureOptions base = {}, int depth = 12);

struct OperatorDiagnostics {
  int coarse_cells = 0;  // cells whose v-width is below the grid spacing
  Real window_tail_fraction = 0.0;  // f-mass outside the truncated cone
};

// Kernel u^{-(n-alpha)} v^{-(1-alpha/n)}; throws outside the open cone.
Real kernel_eval(const KernelParams& params, const ConePoint& p);

// One quadrature node: offset (dy, ds) subtracted from the output point,
// with the kernel and all measure factors folded into the weight.
struct QuadNode {
  Real dy[kMaxDim];
  Real ds;
  Real w;
};

struct CellQuadrature {
  CellIndex cell;
  std::vector<QuadNode> nodes;
};

// Quadrature of the kernel over one cell in cone coordinates (u, v, omega):
// midpoint in u and omega, analytic v-weights, both time signs, and
// recursive clipping against v <= u for ell = 0 cells.  Independent of the
// output point, so one rule serves the whole grid.
CellQuadrature build_cell_quadrature(const KernelParams& params,
                                     const CellIndex& cell,
                                     const QuadratureOptions& opts, Real hx,
                                     Real ht);

Real apply_quadrature_at(const SampledField& f, const CellQuadrature& quad,
                         const Real* x, Real t);

// (Delta_{ell j} I_alpha f) on the grid of f.  Outputs are an independent
// parallel map over grid points; accumulation per point follows the fixed
// node order, so results are reproducible under any worker count.
SampledField apply_cell(const SampledField& f, const KernelParams& params,
                        const CellIndex& cell, const QuadratureOptions& opts,
                        OperatorDiagnostics* diag = nullptr);

// (Delta_ell I_alpha f): sum of apply_cell over the j-window, accumulated
// in ascending j so the cell-consistency identity holds bit-exactly.
SampledField apply_partial(const SampledField& f, const KernelParams& params,
                           int ell, const QuadratureOptions& opts,
                           OperatorDiagnostics* diag = nullptr);

// I^eta_alpha f = sum of apply_partial over ell in [0, ell_max]; the
// truncated operator increases to I_alpha f as the window grows.
SampledField apply_full(const SampledField& f, const KernelParams& params,
                        const QuadratureOptions& opts,
                        OperatorDiagnostics* diag = nullptr);

// (Delta_{ell j} I_alpha f)(x, t) at a single point.
Real apply_cell_at(const SampledField& f, const KernelParams& params,
                   const CellIndex& cell, const QuadratureOptions& opts,
                   const Real* x, Real t);

// Uniformly sampled function on a line, node k at x0 + k h.
struct Line1d {
  Real x0 = 0.0;
  Real h = 1.0;
  Array values;
};

// Riesz potential integral f(y) |x-y|^{alpha-1} dy with the singular factor
// integrated analytically over each sample cell; 0 < alpha < 1.
Real riesz_1d_at(const Line1d& f, Real alpha, Real x);
Line1d riesz_1d(const Line1d& f, Real alpha);

// The n = 1 separable fast path: the full-plane product kernel
// |y+s|^{alpha-1}|y-s|^{alpha-1}, evaluated by rotating to the coordinates
// z = (x+t)/2, w = (x-t)/2 (grid diagonals), applying riesz_1d along each
// diagonal direction in turn and scaling by 2^{2 alpha - 1}.  Dominates the
// cone-restricted integral pointwise.  Requires n = 1 and a square grid.
SampledField apply_n1_separable(const SampledField& f, Real alpha);

}  // namespace lightcone

#endif
