#include "lightcone/cone_geometry.hpp"

#include "lightcone/parallel.hpp"

#include <cassert>
#include <random>

namespace lightcone {

std::optional<CellIndex> classify(const ConePoint& p) {
  const Real u = p.u();
  const Real v = p.v();
  if (!(v > 0.0)) return std::nullopt;
  // ilogb is the exact binary exponent, so dyadic boundaries are classified
  // exactly: u = 2^j lands in cell j (left-closed intervals).
  const int ju = std::ilogb(u);
  const int jv = std::ilogb(v);
  const int ell = ju - jv;
  assert(ell >= 0);  // v <= u forces ilogb(v) <= ilogb(u)
  if (ell < 0) return std::nullopt;
  return CellIndex{ell, ju};
}

bool cell_contains(const CellIndex& cell, const SpaceTimePoint& center,
                   const ConePoint& p) {
  const Real dr = (p.y - center.x).norm();
  const Real dt = std::abs(p.s - center.t);
  const Real u = dt + dr;
  const Real v = dt - dr;
  const int j = static_cast<int>(cell.j);
  const Real u_lo = std::ldexp(1.0, j);
  const Real u_hi = std::ldexp(1.0, j + 1);
  const Real v_lo = std::ldexp(1.0, j - cell.ell);
  const Real v_hi = std::ldexp(1.0, j - cell.ell + 1);
  return u_lo <= u && u < u_hi && v_lo <= v && v < v_hi;
}

bool star_contains(const StarCell& star, const ConePoint& p) {
  const Real dr = (p.y - star.center.x).norm();
  const Real dt = std::abs(p.s - star.center.t);
  const Real u = dt + dr;
  const Real v = dt - dr;
  const int j = static_cast<int>(star.base.j);
  const Real u_lo = std::ldexp(1.0, j - 3);
  const Real u_hi = std::ldexp(1.0, j + 3);
  const Real v_lo = std::ldexp(1.0, j - star.base.ell - 3);
  const Real v_hi = std::ldexp(1.0, j - star.base.ell + 3);
  return u_lo <= u && u < u_hi && v_lo <= v && v < v_hi;
}

Real cell_volume(int n, const CellIndex& cell) {
  if (n < 1 || n > kMaxDim)
    throw std::invalid_argument("cell_volume: n must lie in [1, 3]");
  const int j = static_cast<int>(cell.j);
  if (cell.ell < 0) throw std::invalid_argument("cell_volume: ell must be >= 0");
  const Real u0 = std::ldexp(1.0, j);
  const Real v0 = std::ldexp(1.0, j - cell.ell);
  const int k = n - 1;
  // I = integral over the (u, v) box intersected with {v <= u} of (u-v)^k.
  Real I;
  if (cell.ell == 0) {
    // box [u0, 2u0)^2 cut to the triangle below the diagonal
    I = std::pow(u0, k + 2) / Real((k + 1) * (k + 2));
  } else {
    auto pw = [&](Real x) { return std::pow(x, k + 2); };
    I = (pw(2 * u0 - v0) - pw(2 * u0 - 2 * v0) - pw(u0 - v0) +
         pw(u0 - 2 * v0)) /
        Real((k + 1) * (k + 2));
  }
  // two time signs, |S^{n-1}|, Jacobian 1/2 and radius r = (u-v)/2
  static const Real kSphereArea[kMaxDim + 1] = {0.0, 2.0, 2.0 * M_PI,
                                                4.0 * M_PI};
  return kSphereArea[n] * std::ldexp(I, 1 - n);
}

SphereGrid build_sphere_grid(int n, int eta, Real B) {
  if (n < 1) throw std::invalid_argument("build_sphere_grid: n must be >= 1");
  if (n > kMaxDim)
    throw std::invalid_argument(
        "build_sphere_grid: dimensions above 3 are unsupported");
  if (eta < 1) throw std::invalid_argument("build_sphere_grid: eta must be >= 1");
  if (!(B >= 0.5) || !(B <= 2.0))
    throw std::invalid_argument("build_sphere_grid: B must lie in [1/2, 2]");

  SphereGrid g;
  g.n = n;
  g.eta = eta;
  g.spacing = B * std::ldexp(1.0, -eta);

  const std::int64_t count_bound =
      16 * (std::int64_t(1) << (std::int64_t(eta) * (n - 1)));

  if (n == 1) {
    g.directions.resize(1, 2);
    g.directions(0, 0) = 1.0;
    g.directions(0, 1) = -1.0;
  } else if (n == 2) {
    std::int64_t count = std::llround(2.0 * M_PI / g.spacing);
    count = std::max<std::int64_t>(count, 4);
    g.directions.resize(2, count);
    for (std::int64_t k = 0; k < count; ++k) {
      const Real phi = 2.0 * M_PI * Real(k) / Real(count);
      g.directions(0, k) = std::cos(phi);
      g.directions(1, k) = std::sin(phi);
    }
  } else {
    // Fibonacci point set; the coefficient is calibrated so the mean
    // nearest-neighbor chord is close to the requested spacing.  The count
    // cap keeps the 16 * 2^{eta(n-1)} bound while staying within a factor 2
    // of the target spacing for B in [1/2, 2].
    std::int64_t count = std::llround(10.0 / (g.spacing * g.spacing));
    count = std::min(std::max<std::int64_t>(count, 2), count_bound);
    g.directions.resize(3, count);
    const Real golden = 0.6180339887498948482;  // 1/phi
    for (std::int64_t k = 0; k < count; ++k) {
      const Real z = 1.0 - (2.0 * Real(k) + 1.0) / Real(count);
      const Real r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Real phi = 2.0 * M_PI * std::fmod(Real(k) * golden, 1.0);
      g.directions(0, k) = r * std::cos(phi);
      g.directions(1, k) = r * std::sin(phi);
      g.directions(2, k) = z;
    }
  }

  if (g.count() > count_bound)
    throw std::logic_error(
        "build_sphere_grid: direction count exceeds 16 * 2^{eta(n-1)}");
  return g;
}

bool sector_contains(const SectorIndex& sector, const SpatialVec& y) {
  if (sector.grid == nullptr)
    throw std::invalid_argument("sector_contains: sector has no grid");
  if (sector.nu < 0 || sector.nu >= sector.grid->count())
    throw std::invalid_argument("sector_contains: direction index out of range");
  const Real norm = y.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument(
        "sector_contains: the direction of y = 0 is undefined");
  // |y/|y| - d|^2 = 2 - 2 <y, d> / |y|, compared against the squared chord
  const Real cosang = y.dot(sector.grid->directions.col(sector.nu)) / norm;
  const Real chord = sector_aperture(sector.grid->eta);
  return 2.0 - 2.0 * cosang <= chord * chord;
}

BoundingBox cell_bounding_box(int n, const CellIndex& cell,
                              const SpaceTimePoint& center) {
  // u < 2^{j+1} bounds both |y - x| and |s - t|
  const Real R = std::ldexp(1.0, static_cast<int>(cell.j) + 1);
  BoundingBox box;
  box.y_lo = SpatialVec::Constant(n, -R) + center.x;
  box.y_hi = SpatialVec::Constant(n, R) + center.x;
  box.s_lo = center.t - R;
  box.s_hi = center.t + R;
  return box;
}

BoundingBox star_bounding_box(int n, const CellIndex& base,
                              const SpaceTimePoint& center) {
  const Real R = std::ldexp(1.0, static_cast<int>(base.j) + 3);
  BoundingBox box;
  box.y_lo = SpatialVec::Constant(n, -R) + center.x;
  box.y_hi = SpatialVec::Constant(n, R) + center.x;
  box.s_lo = center.t - R;
  box.s_hi = center.t + R;
  return box;
}

McEstimate mc_measure(const std::function<bool(const ConePoint&)>& region,
                      const BoundingBox& box, std::int64_t samples,
                      std::uint64_t seed) {
  if (samples < 1000)
    throw std::invalid_argument("mc_measure: need at least 10^3 samples");
  const Real vol = box.volume();
  if (!(vol > 0.0))
    throw std::invalid_argument("mc_measure: degenerate bounding box");

  const int n = static_cast<int>(box.y_lo.size());
  constexpr std::int64_t kChunk = 8192;
  const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::int64_t> hits(chunks, 0);

  parallel_for(chunks, [&](std::int64_t c) {
    std::mt19937_64 rng(stream_seed(seed, std::uint64_t(c)));
    std::uniform_real_distribution<Real> unif(0.0, 1.0);
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(samples, lo + kChunk);
    ConePoint p;
    p.y.resize(n);
    std::int64_t h = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      for (int d = 0; d < n; ++d)
        p.y[d] = box.y_lo[d] + (box.y_hi[d] - box.y_lo[d]) * unif(rng);
      p.s = box.s_lo + (box.s_hi - box.s_lo) * unif(rng);
      if (region(p)) ++h;
    }
    hits[c] = h;
  });

  std::int64_t total = 0;
  for (std::int64_t h : hits) total += h;
  const Real phat = Real(total) / Real(samples);
  McEstimate est;
  est.estimate = vol * phat;
  est.std_error = vol * std::sqrt(phat * (1.0 - phat) / Real(samples));
  return est;
}

}  // namespace lightcone
