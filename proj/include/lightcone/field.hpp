#ifndef LIGHTCONE_FIELD_HPP
#define LIGHTCONE_FIELD_HPP

#include "lightcone/cone_geometry.hpp"
#include "lightcone/types.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>

namespace lightcone {

// Uniform box grid on [-L, L]^n x [-T, T] with m cell-centered nodes per
// axis.  Node i of a spatial axis sits at -L + (i + 1/2) hx.
struct GridSpec {
  int n = 1;
  Real L = 1.0;
  Real T = 1.0;
  int m = 8;

  void validate() const {
    if (n < 1 || n > kMaxDim)
      throw std::invalid_argument("GridSpec: n must lie in [1, 3]");
    if (m < 8) throw std::invalid_argument("GridSpec: m must be >= 8");
    if (!(L > 0.0) || !(T > 0.0))
      throw std::invalid_argument("GridSpec: half-widths must be positive");
  }

  Real hx() const { return 2.0 * L / Real(m); }
  Real ht() const { return 2.0 * T / Real(m); }
  Real cell_volume() const { return std::pow(hx(), n) * ht(); }

  std::int64_t spatial_count() const {
    std::int64_t c = 1;
    for (int d = 0; d < n; ++d) c *= m;
    return c;
  }
  std::int64_t node_count() const { return spatial_count() * m; }

  Real x_coord(std::int64_t i) const { return -L + (Real(i) + 0.5) * hx(); }
  Real t_coord(std::int64_t i) const { return -T + (Real(i) + 0.5) * ht(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Non-negative sampled function.  Layout: spatial indices outermost, time
// index innermost, so flat = (((i0) m + i1) ...) m + it.
struct SampledField {
  GridSpec spec;
  Array values;

  Real& at(std::int64_t flat) { return values[flat]; }
  Real at(std::int64_t flat) const { return values[flat]; }
};

SampledField zero_field(const GridSpec& spec);

// Enforces the standing assumptions: finite and >= 0 everywhere.
void validate_field(const SampledField& f);

// Decodes a flat spatial index into per-axis indices.
inline void decode_spatial(const GridSpec& g, std::int64_t sp,
                           std::int64_t* idx) {
  for (int d = g.n - 1; d >= 0; --d) {
    idx[d] = sp % g.m;
    sp /= g.m;
  }
}

// Nearest-node sample of the piecewise-constant extension of f; zero
// outside the grid box.  Cell membership coincides with nearest node on a
// cell-centered grid.
inline Real sample_nearest(const SampledField& f, const Real* ypos,
                           Real tpos) {
  const GridSpec& g = f.spec;
  const Real inv_hx = Real(g.m) / (2.0 * g.L);
  const Real inv_ht = Real(g.m) / (2.0 * g.T);
  std::int64_t sp = 0;
  for (int d = 0; d < g.n; ++d) {
    const Real pos = (ypos[d] + g.L) * inv_hx;
    if (!(pos >= 0.0) || pos >= Real(g.m)) return 0.0;
    sp = sp * g.m + std::int64_t(pos);
  }
  const Real post = (tpos + g.T) * inv_ht;
  if (!(post >= 0.0) || post >= Real(g.m)) return 0.0;
  return f.values[sp * g.m + std::int64_t(post)];
}

// Riemann-sum L^p norm (sum f^p * cell volume)^{1/p}, p >= 1.
Real lp_norm(const SampledField& f, Real p);

// f_lambda(x, t) = f(lambda x, lambda t) on the grid with half-widths
// L/lambda, T/lambda and the same m.  Nearest-node resampling maps node to
// node exactly, preserving non-negativity.
SampledField dilate(const SampledField& f, Real lambda);

enum class TestFieldKind { gaussian, ball_indicator, cone_bump, checkerboard };

TestFieldKind parse_field_kind(const std::string& name);
std::string field_kind_name(TestFieldKind kind);

struct TestFieldParams {
  // center in R^{n+1}; trailing entry is the time coordinate
  Real center[kMaxDim + 1] = {0.0, 0.0, 0.0, 0.0};
  Real sigma = 1.0;                                    // gaussian width
  Real cutoff = std::numeric_limits<Real>::infinity();  // gaussian hard support radius
  Real radius = 1.0;                                   // ball indicator
  CellIndex cell{2, 0};                                // cone_bump target cell
  Real block = 1.0;                                    // checkerboard block size
};

// Deterministic test functions.  cone_bump is the indicator of the target
// cell eroded by one grid cell in (u, v), so its piecewise-constant
// extension stays strictly inside the cell.
SampledField make_test_field(TestFieldKind kind, const GridSpec& spec,
                             const TestFieldParams& params = {});

// Flat binary serialization (magic, n, m, L, T, raw doubles); round trips
// bit-exactly.
void save_field(const SampledField& f, const std::filesystem::path& path);
SampledField load_field(const std::filesystem::path& path);

}  // namespace lightcone

#endif
