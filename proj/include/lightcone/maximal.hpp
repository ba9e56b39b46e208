#ifndef LIGHTCONE_MAXIMAL_HPP
#define LIGHTCONE_MAXIMAL_HPP

#include "lightcone/cone_operator.hpp"
#include "lightcone/field.hpp"

#include <vector>

namespace lightcone {

// theta_ell(x, t) = ||f||_p^{-p} * integral of f^p(x-y, t-s) over the
// translated shell Lambda_ell intersected with the truncation window.
//
// All theta and maximal integrals classify whole grid cells of f by the
// cone cell of their center, so disjointness of the dyadic cells carries
// over exactly: sum_ell theta_ell <= 1 holds by construction.
std::vector<Real> theta_profile_at(const SampledField& f, Real p,
                                   const QuadratureOptions& opts,
                                   const Real* x, Real t);

SampledField theta_field(const SampledField& f, Real p, int ell,
                         const QuadratureOptions& opts);

// sum over ell of theta_ell on the whole grid; single sweep against a
// precomputed classification table over (squared spatial offset, time
// offset), bit-identical to summing theta_field over ell.
SampledField theta_sum_field(const SampledField& f, Real p,
                             const QuadratureOptions& opts);

struct ThetaProfile {
  std::vector<SampledField> theta;  // index ell in [0, ell_max]
  Real p = 2.0;
  Real norm_p = 0.0;
};

ThetaProfile make_theta_profile(const SampledField& f, Real p,
                                const QuadratureOptions& opts);

// (M^nu_eta f)(x, t): sup over cells in the window of the normalized
// average of f over Lambda_{ell j} intersected with the sector Gamma^nu,
// normalizer 2^j 2^{j-ell} 2^{(j-eta)(n-1)}.
SampledField sector_maximal(const SampledField& f, const SphereGrid& grid,
                            int nu, const QuadratureOptions& opts);

// (M_eta f)(x, t) = 2^{-eta(n-1)} sum_nu (M^nu_eta f)(x, t).
SampledField averaged_maximal(const SampledField& f, const SphereGrid& grid,
                              const QuadratureOptions& opts);

struct MaximalValues {
  std::vector<Real> sector;  // M^nu_eta f at the point, per direction
  Real averaged = 0.0;       // M_eta f at the point
};

MaximalValues maximal_at(const SampledField& f, const SphereGrid& grid,
                         const QuadratureOptions& opts, const Real* x, Real t);

// Balance exponent from (2^{rho-ell} 2^{rho n})^{1/p} =
// theta^{1/p} ||f||_p / M: closed-form inversion
// rho = (ell + p log2(theta^{1/p} ||f||_p / M)) / (n + 1).
Real solve_rho(Real theta_val, Real m_val, Real norm_p, int ell,
               const KernelParams& params, Real p);

// rho_ell over the grid; NaN marks points where M_eta f = 0 or
// theta_ell = 0, which the estimates exclude.
struct RhoField {
  std::vector<Array> rho;  // index ell

  std::int64_t defined_count(int ell) const {
    return (rho[std::size_t(ell)] == rho[std::size_t(ell)]).count();
  }
};

RhoField make_rho_field(const ThetaProfile& profile, const SampledField& m_eta,
                        const KernelParams& params);

}  // namespace lightcone

#endif
