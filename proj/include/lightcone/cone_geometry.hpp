#ifndef LIGHTCONE_CONE_GEOMETRY_HPP
#define LIGHTCONE_CONE_GEOMETRY_HPP

#include "lightcone/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

namespace lightcone {

// Point of R^n x R with cone coordinates u = |s| + |y|, v = |s| - |y|.
// The open cone Lambda is v > 0; u >= |v| always holds.
struct ConePoint {
  SpatialVec y;
  Real s = 0.0;

  Real radius() const { return y.norm(); }
  Real u() const { return std::abs(s) + radius(); }
  Real v() const { return std::abs(s) - radius(); }
};

// Translation center (x, t) for translated cells Lambda_{ell j}(x, t).
struct SpaceTimePoint {
  SpatialVec x;
  Real t = 0.0;

  static SpaceTimePoint origin(int n) {
    SpaceTimePoint c;
    c.x = SpatialVec::Zero(n);
    return c;
  }
};

// Dyadic cell: u in [2^j, 2^{j+1}) and v in [2^{j-ell}, 2^{j-ell+1}).
// ell >= 0 is the eccentricity level (v/u ~ 2^{-ell}), j the dyadic scale.
struct CellIndex {
  int ell = 0;
  std::int64_t j = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Widened cell with dyadic slack 3: u in [2^{j-3}, 2^{j+3}) and
// v in [2^{j-ell-3}, 2^{j-ell+3}), relative to its own center.
struct StarCell {
  CellIndex base;
  SpaceTimePoint center;
};

// Cell of the point, or nothing when the point lies outside the open cone.
// Both time signs are kept: the coordinates only see |s|.
std::optional<CellIndex> classify(const ConePoint& p);

// Membership in the translated cell Lambda_{ell j}(x, t); with the origin
// as center this agrees with classify.
bool cell_contains(const CellIndex& cell, const SpaceTimePoint& center,
                   const ConePoint& p);

bool star_contains(const StarCell& star, const ConePoint& p);

// Closed-form Lebesgue measure of Lambda_{ell j} (both time signs).  The
// (u, v) box is cut by the constraint v <= u, which bites only at ell = 0
// where the box touches the diagonal.
Real cell_volume(int n, const CellIndex& cell);

// Directions {y^nu_eta} roughly equally spaced on S^{n-1} with grid length
// B 2^{-eta}.  n = 1 gives {+1, -1}; n = 2 exact equal angles; n = 3 a
// Fibonacci point set.  Deterministic in (n, eta, B).
struct SphereGrid {
  int n = 1;
  int eta = 1;
  Real spacing = 1.0;       // requested grid length B 2^{-eta}
  DirectionSet directions;  // one unit n-vector per column

  int count() const { return static_cast<int>(directions.cols()); }
};

// Count is asserted against the bound 16 * 2^{eta (n-1)}.
SphereGrid build_sphere_grid(int n, int eta, Real B = 1.0);

struct SectorIndex {
  const SphereGrid* grid = nullptr;
  int nu = 0;
};

// Chord threshold 2 * 2^{1-eta} of the sector Gamma^nu_eta.
inline Real sector_aperture(int eta) { return 2.0 * std::ldexp(1.0, 1 - eta); }

// Exact test of |y/|y| - y^nu_eta| <= 2 * 2^{1-eta} (boundary closed).
// Throws for y = 0, whose direction is undefined.
bool sector_contains(const SectorIndex& sector, const SpatialVec& y);

struct BoundingBox {
  SpatialVec y_lo, y_hi;
  Real s_lo = 0.0, s_hi = 0.0;

  Real volume() const {
    Real vol = s_hi - s_lo;
    for (int d = 0; d < y_lo.size(); ++d) vol *= y_hi[d] - y_lo[d];
    return vol;
  }
};

BoundingBox cell_bounding_box(int n, const CellIndex& cell,
                              const SpaceTimePoint& center);
BoundingBox star_bounding_box(int n, const CellIndex& base,
                              const SpaceTimePoint& center);

struct McEstimate {
  Real estimate = 0.0;
  Real std_error = 0.0;
};

// Unbiased uniform Monte Carlo volume of {p in box : region(p)} with its
// standard error.  Samples are drawn in fixed-size chunks with one seeded
// stream per chunk, so the estimate is reproducible for a given (seed,
// samples) regardless of the worker count.
McEstimate mc_measure(const std::function<bool(const ConePoint&)>& region,
                      const BoundingBox& box, std::int64_t samples,
                      std::uint64_t seed);

}  // namespace lightcone

#endif
