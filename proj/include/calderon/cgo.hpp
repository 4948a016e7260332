#pragma once

// Neumann-series principal solutions of Beltrami equations and exponentially
// growing (CGO) solutions with their phase functions and scattering data.
//
// The general real-linear equation is
//     dbar f = mu df + nu conj(df),
// solved in the phase variable f = exp(i k phi): phi obeys
//     dbar phi = mu dphi - lambda (kbar/k) nu e_{-k}(phi) conj(dphi),
// handled by an outer fixed point on the phase-dependent coefficient and
// inner Neumann-series solves of the linearized problem (whose real-linear
// operator norm is ||mu| + |nu||_inf < 1 after truncation).

#include <optional>

#include "calderon/transforms.hpp"

namespace calderon {

inline cplx e_k(cplx k, cplx w) {
  // e_k(w) = exp(i (k w + conj(k w))) = exp(2 i Re(k w)), unimodular
  return std::polar(1.0, 2.0 * (k * w).real());
}

// Pointwise truncation of a coefficient pair so that |mu|+|nu| <= 1 - 1/n,
// preserving arguments.
inline std::pair<GridField, GridField> truncate_mu(const GridField& mu, const GridField& nu,
                                                   int n) {
  if (n < 2) throw domain_error("truncate_mu: n >= 2 required");
  mu.check_same(nu);
  GridField mu_n = mu, nu_n = nu;
  const double cap = 1.0 - 1.0 / n;
  for (size_t i = 0; i < mu.data().size(); ++i) {
    const double s = std::abs(mu.data()[i]) + std::abs(nu.data()[i]);
    if (s > cap) {
      const double c = cap / s;
      mu_n.data()[i] *= c;
      nu_n.data()[i] *= c;
    }
  }
  return {std::move(mu_n), std::move(nu_n)};
}

// ---------------------------------------------------------------------------
// Inner linear solver:  g = (a + b) + a S g + b conj(S g),  returning g and
// S g along with per-term norms of the Neumann series.

struct RealLinearSolve {
  GridField g;    // dbar phi
  GridField Sg;   // dphi - 1
  std::vector<double> term_norms;
};

inline RealLinearSolve solve_real_linear(const GridField& a, const GridField& b, int m_max,
                                         double tol_rel, TransformOptions topt = {}) {
  a.check_same(b);
  const size_t n = a.data().size();
  GridField term(a.N(), a.R());
  for (size_t i = 0; i < n; ++i) term.data()[i] = a.data()[i] + b.data()[i];
  RealLinearSolve out{term, GridField(a.N(), a.R()), {}};
  const double norm0 = std::max(term.norm_l2(), 1e-300);
  out.term_norms.push_back(norm0);
  for (int m = 0; m < m_max; ++m) {
    GridField St = beurling_S(term, topt);
    out.Sg += St;
    for (size_t i = 0; i < n; ++i)
      term.data()[i] = a.data()[i] * St.data()[i] + b.data()[i] * std::conj(St.data()[i]);
    const double tn = term.norm_l2();
    out.term_norms.push_back(tn);
    if (tn < tol_rel * norm0) {
      out.g += term;  // account for the final small term
      return out;
    }
    out.g += term;
    if (m > 8 && tn > 0.999 * out.term_norms[out.term_norms.size() - 2])
      throw convergence_error("solve_real_linear: Neumann series is not contracting");
  }
  throw convergence_error("solve_real_linear: series did not reach tolerance");
}

// ---------------------------------------------------------------------------
// Principal solution of dbar Phi = mu dPhi, Phi = z + O(1/z):
// dbar Phi = sum_m (mu S)^m mu, Phi = z + C(dbar Phi).

struct PrincipalSolution {
  GridField phi_minus_z;           // the decaying part C(dbar Phi)
  GridField dbar_phi;
  std::vector<double> term_norms;  // L2 norms of (mu S)^m mu

  cplx phi_at(cplx z) const { return z + phi_minus_z.interpolate(z); }
};

inline PrincipalSolution principal_solution(const GridField& mu, int m_max = 400,
                                            double tol_rel = 1e-12,
                                            TransformOptions topt = {}) {
  if (mu.norm_max() >= 1.0 - 1e-9) {
    // callers must truncate degenerate coefficients first (the ladder of
    // truncate_mu); reject here to avoid silent non-convergence
    throw convergence_error("principal_solution: ||mu||_inf must stay below 1 - 1e-9");
  }
  GridField zero(mu.N(), mu.R());
  auto solve = solve_real_linear(mu, zero, m_max, tol_rel, topt);
  PrincipalSolution out{cauchy_C(solve.g, topt), std::move(solve.g), std::move(solve.term_norms)};
  return out;
}

// ---------------------------------------------------------------------------
// CGO solution via the outer fixed point on the phase-dependent coefficient.

struct CgoOptions {
  std::vector<int> n_ladder;     // truncation ladder; empty = {64} (and no-op
                                 // if the pair is already admissible)
  int max_outer = 60;
  int max_inner = 600;
  double tol = 1e-6;             // residual target for the outer iteration
  double inner_tol = 1e-11;      // relative cutoff of the inner series
  TransformOptions transform;
};

struct CgoSolution {
  cplx k;
  cplx lambda;
  GridField phi_minus_z;   // phi(z) - z on the grid
  GridField f;             // e^{i k phi}
  GridField M;             // e^{i k (phi - z)} = f e^{-ikz}
  int outer_iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  std::vector<double> inner_term_norms;  // Neumann-series terms of the last solve

  cplx phi_at(cplx z) const { return z + phi_minus_z.interpolate(z); }
};

namespace detail {

// One truncation rung: solve the phase equation for fixed (mu_n, nu_n).
inline CgoSolution cgo_rung(const GridField& mu_n, const GridField& nu_n, cplx k, cplx lambda,
                            const CgoOptions& opt) {
  const int N = mu_n.N();
  const double R = mu_n.R();
  const cplx swirl = -lambda * std::conj(k) / k;

  CgoSolution sol;
  sol.k = k;
  sol.lambda = lambda;
  sol.phi_minus_z = GridField(N, R);

  GridField kappa(N, R);
  double best_residual = std::numeric_limits<double>::infinity();
  GridField best_phi = sol.phi_minus_z;
  int since_best = 0;

  for (int outer = 0; outer < opt.max_outer; ++outer) {
    // kappa(z) = -lambda (kbar/k) nu(z) e_{-k}(phi(z))
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const cplx phi = mu_n.point(ix, iy) + sol.phi_minus_z(ix, iy);
        kappa(ix, iy) = swirl * nu_n(ix, iy) * e_k(-k, phi);
      }
    auto lin = solve_real_linear(mu_n, kappa, opt.max_inner, opt.inner_tol, opt.transform);
    sol.phi_minus_z = cauchy_C(lin.g, opt.transform);
    sol.outer_iterations = outer + 1;
    sol.inner_term_norms = lin.term_norms;

    // residual of the phase equation with the coefficient re-evaluated at
    // the new phase
    double num = 0.0, den = 0.0;
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const cplx dphi = 1.0 + lin.Sg(ix, iy);
        const cplx phi = mu_n.point(ix, iy) + sol.phi_minus_z(ix, iy);
        const cplx kap_new = swirl * nu_n(ix, iy) * e_k(-k, phi);
        const cplx r = lin.g(ix, iy) - mu_n(ix, iy) * dphi - kap_new * std::conj(dphi);
        num += std::norm(r);
        den += std::norm(dphi);
      }
    const double res = std::sqrt(num / std::max(den, 1e-300));
    sol.residual_history.push_back(res);
    sol.residual = res;
    if (res < best_residual) {
      best_residual = res;
      best_phi = sol.phi_minus_z;
      since_best = 0;
    } else if (++since_best >= 10) {
      throw convergence_error("cgo_solve: outer fixed point stagnated (residual history: " +
                              std::to_string(sol.residual_history.front()) + " ... " +
                              std::to_string(res) + ")");
    }
    if (res < opt.tol) break;
  }
  sol.phi_minus_z = best_phi;
  sol.residual = best_residual;

  sol.f = GridField(N, R);
  sol.M = GridField(N, R);
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) {
      const cplx pz = sol.phi_minus_z(ix, iy);
      const cplx z = sol.f.point(ix, iy);
      sol.M(ix, iy) = std::exp(cplx(0, 1) * k * pz);
      sol.f(ix, iy) = std::exp(cplx(0, 1) * k * (z + pz));
    }
  return sol;
}

}  // namespace detail

inline CgoSolution cgo_solve(const GridField& mu, const GridField& nu, cplx k, cplx lambda,
                             CgoOptions opt = {}) {
  if (k == cplx(0, 0)) throw domain_error("cgo_solve: k must be nonzero");
  if (std::abs(lambda) > 1.0 + 1e-12) throw domain_error("cgo_solve: |lambda| <= 1 required");
  mu.check_same(nu);

  // If the pair is already strictly admissible the ladder is a no-op.
  double sup = 0.0;
  for (size_t i = 0; i < mu.data().size(); ++i)
    sup = std::max(sup, std::abs(mu.data()[i]) + std::abs(nu.data()[i]));
  std::vector<int> ladder = opt.n_ladder;
  if (ladder.empty()) ladder = {64};
  if (sup <= 1.0 - 1.0 / ladder.back()) {
    auto [mu_n, nu_n] = truncate_mu(mu, nu, ladder.back());
    return detail::cgo_rung(mu_n, nu_n, k, lambda, opt);
  }

  std::vector<CgoSolution> rung;
  for (int n : ladder) {
    auto [mu_n, nu_n] = truncate_mu(mu, nu, n);
    rung.push_back(detail::cgo_rung(mu_n, nu_n, k, lambda, opt));
  }
  CgoSolution out = rung.back();
  if (rung.size() >= 3) {
    // Aitken acceleration of the phase across the last three rungs.
    const auto& p0 = rung[rung.size() - 3].phi_minus_z;
    const auto& p1 = rung[rung.size() - 2].phi_minus_z;
    const auto& p2 = rung[rung.size() - 1].phi_minus_z;
    const int N = mu.N();
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix)
        out.phi_minus_z(ix, iy) = aitken(p0(ix, iy), p1(ix, iy), p2(ix, iy));
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const cplx pz = out.phi_minus_z(ix, iy);
        const cplx z = out.f.point(ix, iy);
        out.M(ix, iy) = std::exp(cplx(0, 1) * k * pz);
        out.f(ix, iy) = std::exp(cplx(0, 1) * k * (z + pz));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// sup_z |phi_lambda(z, k) - z| per k over a set of unimodular lambda.

struct AsymptoticSweep {
  std::vector<cplx> k;
  std::vector<double> sup_phase_defect;  // max over z and lambda
};

inline AsymptoticSweep asymptotic_sweep(const GridField& mu, const GridField& nu,
                                        const std::vector<cplx>& k_ladder,
                                        const std::vector<cplx>& lambdas, CgoOptions opt = {}) {
  AsymptoticSweep out;
  out.k = k_ladder;
  out.sup_phase_defect.resize(k_ladder.size(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (size_t i = 0; i < k_ladder.size(); ++i) {
    double worst = 0.0;
    for (cplx lam : lambdas) {
      const auto sol = cgo_solve(mu, nu, k_ladder[i], lam, opt);
      worst = std::max(worst, sol.phi_minus_z.norm_max());
    }
    out.sup_phase_defect[i] = worst;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scattering data for the isotropic family: f_{+-mu} solve
// dbar f = +-mu conj(df); t_{+-}(k) = (i/2pi) contour_int_{|z|=1} M dz and
// tau = (t_+ - t_-)/2.

struct ScatteringSample {
  cplx k;
  cplx t_plus, t_minus, tau;
};

inline cplx contour_mean(const GridField& M, double radius = 1.0, int n_nodes = 512) {
  // (i / 2 pi) contour integral of M over |z| = radius (trapezoid rule)
  cplx acc(0, 0);
  for (int j = 0; j < n_nodes; ++j) {
    const double th = 2.0 * pi * j / n_nodes;
    const cplx z = std::polar(radius, th);
    acc += M.interpolate(z) * cplx(0, 1) * z;  // dz = i z dtheta
  }
  return acc * cplx(0, 1) / (2.0 * pi) * (2.0 * pi / n_nodes);
}

inline ScatteringSample scattering_at(const GridField& mu, cplx k, CgoOptions opt = {}) {
  GridField zero(mu.N(), mu.R());
  GridField neg = mu;
  neg *= -1.0;
  const auto fp = cgo_solve(zero, mu, k, 1.0, opt);
  const auto fm = cgo_solve(zero, neg, k, 1.0, opt);
  ScatteringSample s;
  s.k = k;
  s.t_plus = contour_mean(fp.M);
  s.t_minus = contour_mean(fm.M);
  s.tau = 0.5 * (s.t_plus - s.t_minus);
  return s;
}

inline std::vector<ScatteringSample> scattering_data(const GridField& mu,
                                                     const std::vector<cplx>& k_grid,
                                                     CgoOptions opt = {}) {
  std::vector<ScatteringSample> out(k_grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (size_t i = 0; i < k_grid.size(); ++i) out[i] = scattering_at(mu, k_grid[i], opt);
  return out;
}

}  // namespace calderon
