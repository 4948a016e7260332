#pragma once

// Planar transformation maps: the cloak blow-up F0, radial blow-up maps with
// prescribed subexponentially integrable distortion, push-forward of
// conductivities, and the cloak / hologram constructions.

#include <memory>
#include <utility>

#include "calderon/conductivity.hpp"
#include "calderon/numerics.hpp"
#include "calderon/weights.hpp"

namespace calderon {

class PlaneMap {
public:
  using EvalFn = std::function<cplx(cplx)>;
  using JacFn = std::function<Mat2(cplx)>;

  PlaneMap(EvalFn fwd, EvalFn inv, JacFn jac, bool boundary_fixing)
      : fwd_(std::move(fwd)), inv_(std::move(inv)), jac_(std::move(jac)),
        boundary_fixing_(boundary_fixing) {}

  cplx eval(cplx z) const { return fwd_(z); }
  cplx inverse(cplx y) const { return inv_(y); }
  Mat2 jacobian(cplx z) const { return jac_(z); }
  bool boundary_fixing() const { return boundary_fixing_; }

  // The inverse homeomorphism as a map of its own; DG(y) = DF(G(y))^{-1}.
  PlaneMap inverted() const {
    auto self = *this;
    return PlaneMap([self](cplx y) { return self.inverse(y); },
                    [self](cplx z) { return self.eval(z); },
                    [self](cplx y) { return self.jacobian(self.inverse(y)).inverse(); },
                    boundary_fixing_);
  }

  static PlaneMap identity() {
    return PlaneMap([](cplx z) { return z; }, [](cplx y) { return y; },
                    [](cplx) { return Mat2{1, 0, 0, 1}; }, true);
  }

  // F(z) = (z/|z|) rho(|z|) for a strictly increasing radial profile.
  static PlaneMap radial(std::function<double(double)> rho, std::function<double(double)> drho,
                         std::function<double(double)> rho_inv, bool boundary_fixing) {
    auto shared_rho = std::make_shared<std::function<double(double)>>(std::move(rho));
    auto shared_drho = std::make_shared<std::function<double(double)>>(std::move(drho));
    auto shared_inv = std::make_shared<std::function<double(double)>>(std::move(rho_inv));
    return PlaneMap(
        [shared_rho](cplx z) {
          const double s = std::abs(z);
          if (s == 0.0) throw domain_error("radial map: undefined at the origin");
          return z / s * (*shared_rho)(s);
        },
        [shared_inv](cplx y) {
          const double r = std::abs(y);
          if (r == 0.0) throw domain_error("radial map inverse: undefined at the origin");
          return y / r * (*shared_inv)(r);
        },
        [shared_rho, shared_drho](cplx z) {
          const double s = std::abs(z);
          if (s == 0.0) throw domain_error("radial map jacobian: undefined at the origin");
          const double c = z.real() / s, sn = z.imag() / s;
          const double a = (*shared_drho)(s);       // radial stretch
          const double b = (*shared_rho)(s) / s;    // tangential stretch
          return Mat2{a * c * c + b * sn * sn, (a - b) * c * sn,
                      (a - b) * c * sn, a * sn * sn + b * c * c};
        },
        boundary_fixing);
  }

private:
  EvalFn fwd_, inv_;
  JacFn jac_;
  bool boundary_fixing_;
};

// The standard cloak map F0(z) = (|z|/2 + 1) z/|z|, B(2)\{0} -> B(2)\B(1),
// identity on |z| = 2, inverse y -> 2(|y|-1) y/|y|.
inline PlaneMap cloak_map_F0() {
  return PlaneMap::radial([](double s) { return 0.5 * s + 1.0; },
                          [](double) { return 0.5; },
                          [](double r) {
                            if (r <= 1.0)
                              throw domain_error("cloak map: point inside the cloaked region");
                            return 2.0 * (r - 1.0);
                          },
                          true);
}

// ---------------------------------------------------------------------------
// Radial blow-up profile with prescribed integrable distortion:
//   A1(S(t)) = 1 + log(1/t),   rho(s) = 1 + c1 (exp(int_0^s dt/(t S(t))) - 1),
// where A1(t) = A(arg_scale * t) and c1 is normalized so that rho(2) = 2.

class BlowupProfile {
public:
  BlowupProfile(const WeightGauge& w, double arg_scale) : w_(w), scale_(arg_scale) {
    const GrowthReport rep = classify_growth(w_, 1e6);
    if (rep.verdict != GrowthVerdict::converges)
      throw convergence_error(
          "blow-up profile: weight is not sublinear (tail integral does not converge)");
    c1_ = 1.0 / std::expm1(phase_integral(2.0));
  }

  // I(s) = int_0^s dt/(t S(t)), evaluated through the tail of the weight.
  double phase_integral(double s) const {
    if (!(s > 0.0 && s <= 2.0 + 1e-9)) throw domain_error("phase_integral: s in (0,2] required");
    return scale_ * w_.phase_integral_tail(std::log(1.0 / std::min(s, 2.0)));
  }

  double S(double t) const { return w_.inverse(1.0 + std::log(1.0 / t)) / scale_; }

  double rho(double s) const { return 1.0 + c1_ * std::expm1(phase_integral(s)); }

  double drho(double s) const {
    return c1_ * std::exp(phase_integral(s)) / (s * S(s));
  }

  double rho_inverse(double r) const {
    if (!(r > 1.0 && r <= 2.0)) throw domain_error("rho_inverse: r in (1,2] required");
    // rho is strictly increasing from 1 to 2 on (0,2]; bracket geometrically.
    double hi = 2.0, lo = 2.0;
    while (rho(lo) > r && lo > 1e-300) lo *= 0.5;
    double s = bisect([&](double x) { return rho(x) - r; }, lo, hi, {1e-13, 400});
    for (int i = 0; i < 3; ++i) {
      const double step = (rho(s) - r) / drho(s);
      const double sn = s - step;
      if (!(sn > 0.0) || !std::isfinite(sn)) break;
      s = sn;
    }
    return s;
  }

  double c1() const { return c1_; }

private:
  WeightGauge w_;
  double scale_;
  double c1_;
};

// Radial homeomorphism B(2)\{0} -> B(2)\B(1) with distortion controlled by
// the weight; boundary-fixing on |z| = 2 by the rho(2) = 2 normalization.
inline PlaneMap iwaniec_martin_map(const WeightGauge& w, double arg_scale = 1.0) {
  auto prof = std::make_shared<BlowupProfile>(w, arg_scale);
  return PlaneMap::radial([prof](double s) { return prof->rho(s); },
                          [prof](double s) { return prof->drho(s); },
                          [prof](double r) { return prof->rho_inverse(r); }, true);
}

// ---------------------------------------------------------------------------
// Push-forward (F_* sigma)(y) = DF(x) sigma(x) DF(x)^t / det DF(x), x=Finv(y).

inline ConductivityField pushforward(const ConductivityField& sigma, const PlaneMap& F,
                                     double support_radius = 2.0,
                                     std::vector<double> singular = {}) {
  return ConductivityField(
      [sigma, F](cplx y) -> SigmaSample {
        const cplx x = F.inverse(y);  // throws domain_error where F is not invertible
        const Mat2 DF = F.jacobian(x);
        const double J = DF.det();
        if (J <= 0.0) throw domain_error("pushforward: non-positive Jacobian");
        const SigmaSample s = sigma.sample(x);
        if (s.degenerate()) return s;
        const Mat2 t = DF * s.m.full() * DF.transpose();
        return SigmaSample{Sym2{t.a11 / J, 0.5 * (t.a12 + t.a21) / J, t.a22 / J}};
      },
      support_radius, Provenance::pushforward, std::move(singular));
}

// Cloaking conductivity: F_* sigma outside the cloaked region,
// a user-supplied bounded filler eta inside it.
inline ConductivityField make_cloak(double base_sigma = 1.0, Sym2 eta = Sym2::identity()) {
  const auto [e1, e2] = eta.eigenvalues();
  if (!(e2 > 0.0) || !eta.finite())
    throw domain_error("make_cloak: filler eta must be bounded positive definite");
  return ConductivityField(
      [base_sigma, eta](cplx y) -> SigmaSample {
        const double r = std::abs(y);
        // (F0)_* (base * I): eigenvalues base*(r-1)/r radially, base*r/(r-1)
        // tangentially; degenerate on the cloaking circle itself.
        if (std::abs(r - 1.0) < 1e-12) return SigmaSample{Sym2::identity(), true, true};
        if (r < 1.0) return SigmaSample{eta};
        const double lr = base_sigma * (r - 1.0) / r, lt = base_sigma * r / (r - 1.0);
        SigmaSample s{polar_frame(y, lr, lt)};
        s.eig_lo = std::min(lr, lt);
        s.eig_hi = std::max(lr, lt);
        return s;
      },
      2.0, Provenance::cloak, {1.0});
}

// Electric hologram: sigma1 = (F1^{-1})_* 1 with F1 the blow-up map for the
// weight A1(t) = A(4t); det(sigma1) = 1, singular at the origin.
inline ConductivityField hologram_conductivity(const WeightGauge& w) {
  auto prof = std::make_shared<BlowupProfile>(w, 4.0);
  return ConductivityField::radial_eigen(
      [prof](double s) -> std::pair<double, double> {
        const double rho = prof->rho(s), dr = prof->drho(s);
        return {rho / (s * dr), s * dr / rho};
      },
      2.0, Provenance::hologram, {0.0});
}

}  // namespace calderon
