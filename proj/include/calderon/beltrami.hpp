#pragma once

// Dictionary between symmetric conductivity matrices and the Beltrami
// coefficients (mu, nu) of the associated first-order system, plus the
// isothermal coefficient mu-hat.  nu comes out real for symmetric sigma.

#include "calderon/numerics.hpp"

namespace calderon {

struct BeltramiCoefficients {
  cplx mu;
  double nu;
};

inline BeltramiCoefficients beltrami_from_sigma(const Sym2& s) {
  if (!s.finite()) throw domain_error("beltrami_from_sigma: non-finite entries");
  const auto [l1, l2] = s.eigenvalues();
  if (!(l2 > 0.0)) throw domain_error("beltrami_from_sigma: matrix must be positive definite");
  const double D = 1.0 + s.trace() + s.det();
  return {cplx(s.a22 - s.a11, -2.0 * s.a12) / D, (1.0 - s.det()) / D};
}

// Inverse dictionary.  Writing D = 1 + tr + det, the definitions give
//   s22 - s11 = D Re(mu),  s12 = -D Im(mu)/2,  det = 1 - nu D,
//   tr = D (1 + nu) - 2,
// and eliminating the entries through 4 det = tr^2 - D^2 |mu|^2 collapses to
//   D = 4 / ((1 + nu)^2 - |mu|^2).
inline Sym2 sigma_from_beltrami(cplx mu, double nu) {
  if (std::abs(mu) + std::abs(nu) >= 1.0)
    throw domain_error("sigma_from_beltrami: |mu| + |nu| must be < 1");
  const double denom = (1.0 + nu) * (1.0 + nu) - std::norm(mu);
  if (denom <= 0.0) throw domain_error("sigma_from_beltrami: degenerate pair");
  const double D = 4.0 / denom;
  const double tr = D * (1.0 + nu) - 2.0;
  Sym2 s;
  s.a11 = 0.5 * (tr - D * mu.real());
  s.a22 = 0.5 * (tr + D * mu.real());
  s.a12 = -0.5 * D * mu.imag();
  return s;
}

inline double K_mu_nu(cplx mu, cplx nu) {
  const double s = std::abs(mu) + std::abs(nu);
  if (s >= 1.0) return std::numeric_limits<double>::infinity();
  return (1.0 + s) / (1.0 - s);
}

// Isothermal-coordinates coefficient (the Beltrami datum whose principal
// solution flattens sigma):  (s11 - s22 + 2 i s12) / (s11 + s22 + 2 sqrt(det)).
inline cplx isothermal_mu_hat(const Sym2& s) {
  const double d = s.det();
  if (!(d > 0.0)) throw domain_error("isothermal_mu_hat: det(sigma) must be positive");
  return cplx(s.a11 - s.a22, 2.0 * s.a12) / (s.a11 + s.a22 + 2.0 * std::sqrt(d));
}

}  // namespace calderon
