#ifndef LIGHTCONE_TYPES_HPP
#define LIGHTCONE_TYPES_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lightcone {

using Real = double;
using Array = Eigen::ArrayXd;

// Spatial vectors live in R^n with n <= 3; the bounded dynamic size keeps
// them on the stack while the dimension stays a runtime value.
constexpr int kMaxDim = 3;
using SpatialVec =
    Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using DirectionSet = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::ColMajor, kMaxDim, Eigen::Dynamic>;

// Dimension n and order alpha of the kernel u^{-(n-alpha)} v^{-(1-alpha/n)}
// in cone coordinates u = |s|+|y|, v = |s|-|y|.  Both exponents are positive
// for 0 < alpha < n, so the v-singularity at the cone boundary is integrable.
struct KernelParams {
  int n = 1;
  Real alpha = 0.5;

  KernelParams() = default;
  KernelParams(int n_, Real alpha_) : n(n_), alpha(alpha_) { validate(); }

  void validate() const {
    if (n < 1 || n > kMaxDim)
      throw std::invalid_argument("KernelParams: n must lie in [1, 3]");
    if (!(alpha > 0.0) || !(alpha < Real(n)))
      throw std::invalid_argument("KernelParams: alpha must lie in (0, n)");
  }

  Real u_exponent() const { return Real(n) - alpha; }        // power of 1/u
  Real v_exponent() const { return 1.0 - alpha / Real(n); }  // power of 1/v
};

// Lebesgue exponents 1 < p < q < infinity.
struct ExponentPair {
  Real p = 2.0;
  Real q = 4.0;

  ExponentPair() = default;
  ExponentPair(Real p_, Real q_) : p(p_), q(q_) { validate(); }

  void validate() const {
    if (!(p > 1.0) || !(q > p) || !std::isfinite(q))
      throw std::invalid_argument("ExponentPair: need 1 < p < q < infinity");
  }

  // alpha/n = 1/p - 1/q up to round-off
  bool on_line(Real alpha, int n) const {
    return std::abs(alpha / Real(n) - (1.0 / p - 1.0 / q)) < 1e-12;
  }
};

// q from alpha/n = 1/p - 1/q; rejects the degenerate case 1/p <= alpha/n.
inline Real derive_q(Real p, Real alpha, int n) {
  const Real inv_q = 1.0 / p - alpha / Real(n);
  if (!(inv_q > 0.0))
    throw std::invalid_argument(
        "derive_q: 1/p - alpha/n <= 0, no finite q satisfies the exponent "
        "relation");
  const Real q = 1.0 / inv_q;
  ExponentPair{p, q}.validate();
  return q;
}

}  // namespace lightcone

#endif
