#pragma once

// Sobolev-Orlicz regularity gauges and Orlicz/Luxemburg norms on sampled
// fields.  Q(t) = t^2/log(e+t) is the gauge of exponentially integrable
// ellipticity; P(t) = t^2 / Ainv(log t^2) generalizes it to a weight A.

#include <vector>

#include "calderon/numerics.hpp"
#include "calderon/weights.hpp"

namespace calderon {

inline double gauge_Q(double t) {
  if (!(t >= 0.0)) throw domain_error("gauge_Q: t >= 0 required");
  return t * t / std::log(std::exp(1.0) + t);
}

inline double gauge_P(double t, const WeightGauge& w) {
  if (!(t >= 0.0)) throw domain_error("gauge_P: t >= 0 required");
  if (t < 1.0) return t * t;
  return t * t / w.inverse(std::log(t * t));
}

// ---------------------------------------------------------------------------
// P-modulus of continuity: M solving  int_1^{1/t} P(s M) ds/s^3 = P(1) = 1.

struct ModulusResult {
  double value = 0.0;
  bool capped = false;  // integration interval collapsed (t -> 1) or M out of range
};

inline ModulusResult modulus_M_P(double t, const WeightGauge& w) {
  if (!(t > 0.0 && t < 1.0)) throw domain_error("modulus_M_P: t in (0,1) required");
  constexpr double M_cap = 1e12;
  const double U = std::log(1.0 / t);  // integrate in u = log s over [0, U]
  const auto lhs = [&](double M) {
    return integrate([&](double u) { return gauge_P(M * std::exp(u), w) * std::exp(-2.0 * u); },
                     0.0, U, 1e-11);
  };
  const double target = 1.0;  // P(1)
  if (U < 1e-12 || lhs(M_cap) < target) return {M_cap, true};
  double lo = 1e-12;
  if (lhs(lo) > target) return {lo, true};
  double M = bisect([&](double M_) { return lhs(M_) - target; }, lo, M_cap, {1e-8, 200});
  return {M, false};
}

// ---------------------------------------------------------------------------
// Orlicz gauges M_{j,q}(t) = |t|^j log^q(e + |t|) on sampled fields.

struct OrliczSpec {
  int j = 2;
  double q = 0.0;

  double operator()(double t) const {
    const double a = std::abs(t);
    return std::pow(a, double(j)) * std::pow(std::log(std::exp(1.0) + a), q);
  }
};

struct SampledField {
  std::vector<double> values;
  std::vector<double> areas;  // quadrature cell areas

  static SampledField uniform(std::vector<double> v, double domain_area) {
    SampledField f;
    const double a = domain_area / double(v.size());
    f.areas.assign(v.size(), a);
    f.values = std::move(v);
    return f;
  }
};

namespace detail {
inline double modular(const SampledField& u, const OrliczSpec& spec, double t) {
  double s = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i) s += spec(u.values[i] / t) * u.areas[i];
  return s;
}
}  // namespace detail

// Luxemburg norm  inf{ t > 0 : sum M(u_i/t) area_i <= 1 }.
inline double luxemburg_norm(const SampledField& u, const OrliczSpec& spec) {
  if (u.values.size() != u.areas.size())
    throw domain_error("luxemburg_norm: values/areas size mismatch");
  double peak = 0.0;
  for (double v : u.values) {
    if (std::isnan(v)) throw domain_error("luxemburg_norm: NaN sample");
    peak = std::max(peak, std::abs(v));
  }
  if (peak == 0.0) return 0.0;
  double hi = peak;
  while (detail::modular(u, spec, hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (detail::modular(u, spec, lo) < 1.0 && lo > 1e-300) lo *= 0.5;
  // modular is decreasing in t; bisect on the crossing.
  for (int i = 0; i < 200 && (hi - lo) > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::modular(u, spec, mid) > 1.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Orlicz (dual) norm via the Amemiya formula  inf_k (1 + rho(k u)) / k,
// equal to the norm defined through the complementary Young pair.
inline double orlicz_norm(const SampledField& u, const OrliczSpec& spec) {
  if (u.values.size() != u.areas.size())
    throw domain_error("orlicz_norm: values/areas size mismatch");
  double peak = 0.0;
  for (double v : u.values) {
    if (std::isnan(v)) throw domain_error("orlicz_norm: NaN sample");
    peak = std::max(peak, std::abs(v));
  }
  if (peak == 0.0) return 0.0;
  const auto objective = [&](double logk) {
    const double k = std::exp(logk);
    double s = 0.0;
    for (size_t i = 0; i < u.values.size(); ++i) s += spec(k * u.values[i]) * u.areas[i];
    return (1.0 + s) / k;
  };
  // Golden-section on log k; the Amemiya objective is unimodal.
  double a = std::log(1e-8 / peak), b = std::log(1e8 / peak);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  for (int i = 0; i < 200 && (b - a) > 1e-12; ++i) {
    if (fc < fd) { b = d; d = c; fd = fc; c = b - gr * (b - a); fc = objective(c); }
    else { a = c; c = d; fc = fd; d = a + gr * (b - a); fd = objective(d); }
  }
  return objective(0.5 * (a + b));
}

}  // namespace calderon
