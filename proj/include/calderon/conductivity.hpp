#pragma once

// Symmetric, possibly degenerate conductivity fields on the disc B(2) and
// their pointwise spectral diagnostics.  Degenerate eigenvalues (0 or inf)
// are carried in an explicit mask, never as IEEE infinities inside matrix
// algebra.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "calderon/numerics.hpp"

namespace calderon {

enum class Provenance { analytic_radial, pushforward, grid_sampled, hologram, cloak };

struct SigmaSample {
  Sym2 m;                  // finite part (meaningful where masks are clear)
  bool eigen_zero = false;   // some eigenvalue degenerates to 0 here
  bool eigen_inf = false;    // some eigenvalue degenerates to infinity here
  // Analytic eigenvalues where the construction knows them (radial fields);
  // recovering lambda_min from the assembled matrix loses it to cancellation
  // once the anisotropy approaches 1/eps.
  double eig_lo = -1.0, eig_hi = -1.0;

  bool degenerate() const { return eigen_zero || eigen_inf; }
  bool has_exact_eigs() const { return eig_lo >= 0.0 && eig_hi >= eig_lo; }
};

class ConductivityField {
public:
  using EvalFn = std::function<SigmaSample(cplx)>;

  ConductivityField(EvalFn f, double support_radius, Provenance prov,
                    std::vector<double> singular_radii = {})
      : eval_(std::move(f)),
        support_radius_(support_radius),
        provenance_(prov),
        singular_radii_(std::move(singular_radii)) {}

  SigmaSample sample(cplx z) const {
    if (std::abs(z) > support_radius_) return {Sym2::identity(), false, false};
    return eval_(z);
  }

  // Finite matrix value; throws on masked/degenerate points.
  Sym2 at(cplx z) const {
    const SigmaSample s = sample(z);
    if (s.degenerate()) throw domain_error("ConductivityField: degenerate sample");
    if (!s.m.finite()) throw domain_error("ConductivityField: non-finite sample");
    return s.m;
  }

  double support_radius() const { return support_radius_; }
  Provenance provenance() const { return provenance_; }
  const std::vector<double>& singular_radii() const { return singular_radii_; }

  static ConductivityField identity() {
    return ConductivityField([](cplx) { return SigmaSample{Sym2::identity()}; }, 0.0,
                             Provenance::analytic_radial);
  }

  static ConductivityField isotropic(std::function<double(cplx)> gamma, double support_radius,
                                     std::vector<double> singular = {}) {
    return ConductivityField(
        [g = std::move(gamma)](cplx z) {
          const double v = g(z);
          SigmaSample s{Sym2::diag(v, v)};
          if (v == 0.0) s.eigen_zero = true;
          if (!std::isfinite(v)) { s.eigen_inf = true; s.m = Sym2::identity(); }
          else { s.eig_lo = s.eig_hi = v; }
          return s;
        },
        support_radius, Provenance::analytic_radial, std::move(singular));
  }

  // Radial/tangential eigenvalue profiles in the polar frame.
  static ConductivityField radial_eigen(std::function<std::pair<double, double>(double)> eig,
                                        double support_radius, Provenance prov,
                                        std::vector<double> singular = {}) {
    return ConductivityField(
        [e = std::move(eig)](cplx z) {
          const double r = std::abs(z);
          if (r == 0.0)
            return SigmaSample{Sym2::identity(), false, true};
          auto [lr, lt] = e(r);
          SigmaSample s;
          if (lr == 0.0 || lt == 0.0) { s.eigen_zero = true; }
          if (!std::isfinite(lr) || !std::isfinite(lt)) {
            s.eigen_inf = true;
            lr = std::isfinite(lr) ? lr : 1.0;
            lt = std::isfinite(lt) ? lt : 1.0;
          }
          s.m = polar_frame(z, lr, lt);
          if (!s.degenerate()) {
            s.eig_lo = std::min(lr, lt);
            s.eig_hi = std::max(lr, lt);
          }
          return s;
        },
        support_radius, prov, std::move(singular));
  }

  // The insulating-disc field: 1 on 1 < |z| < 2, eigenvalue-0 mask on B(1).
  static ConductivityField insulating_disc() {
    return ConductivityField(
        [](cplx z) {
          if (std::abs(z) < 1.0) return SigmaSample{Sym2{0, 0, 0}, true, false};
          return SigmaSample{Sym2::identity()};
        },
        2.0, Provenance::analytic_radial, {1.0});
  }

private:
  EvalFn eval_;
  double support_radius_;
  Provenance provenance_;
  std::vector<double> singular_radii_;
};

// ---------------------------------------------------------------------------
// Pointwise spectral report: trace, determinant, anisotropy and ellipticity,
// with the identity K = k_sigma * max(det^1/2, det^-1/2).

struct SpectralReport {
  double trace = 0, trace_inv = 0, det = 0;
  double k_sigma = 1;                                  // sqrt(l1/l2)
  double K = 1;                                        // ellipticity
  double lambda_max = 1, lambda_min = 1;
  bool degenerate = false;
};

inline SpectralReport spectral(const Sym2& m) {
  if (!m.finite()) throw domain_error("spectral: NaN or infinite entries");
  auto [l1, l2] = m.eigenvalues();
  if (l2 < 0 && l2 > -1e-14 * std::max(1.0, l1)) l2 = 0.0;  // clip rounding
  if (l2 < 0) throw domain_error("spectral: matrix is not positive semidefinite");
  SpectralReport r;
  r.lambda_max = l1;
  r.lambda_min = l2;
  r.trace = l1 + l2;
  r.det = l1 * l2;
  if (l2 == 0.0) {
    r.degenerate = true;
    r.trace_inv = std::numeric_limits<double>::infinity();
    r.k_sigma = std::numeric_limits<double>::infinity();
    r.K = std::numeric_limits<double>::infinity();
    return r;
  }
  r.trace_inv = 1.0 / l1 + 1.0 / l2;
  r.k_sigma = std::sqrt(l1 / l2);
  r.K = std::max(l1, 1.0 / l2);
  return r;
}

inline SpectralReport spectral(const SigmaSample& s) {
  if (s.degenerate()) {
    SpectralReport r;
    r.degenerate = true;
    r.K = std::numeric_limits<double>::infinity();
    r.k_sigma = std::numeric_limits<double>::infinity();
    if (s.eigen_inf) r.trace = std::numeric_limits<double>::infinity();
    if (s.eigen_zero) r.trace_inv = std::numeric_limits<double>::infinity();
    return r;
  }
  if (s.has_exact_eigs()) {
    SpectralReport r;
    r.lambda_max = s.eig_hi;
    r.lambda_min = s.eig_lo;
    r.trace = s.eig_hi + s.eig_lo;
    r.det = s.eig_hi * s.eig_lo;
    if (s.eig_lo == 0.0) {
      r.degenerate = true;
      r.trace_inv = r.k_sigma = r.K = std::numeric_limits<double>::infinity();
      return r;
    }
    r.trace_inv = 1.0 / s.eig_hi + 1.0 / s.eig_lo;
    r.k_sigma = std::sqrt(s.eig_hi / s.eig_lo);
    r.K = std::max(s.eig_hi, 1.0 / s.eig_lo);
    return r;
  }
  return spectral(s.m);
}

inline SpectralReport spectral(const ConductivityField& sigma, cplx z) {
  return spectral(sigma.sample(z));
}

}  // namespace calderon
