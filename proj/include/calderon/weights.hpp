#pragma once

// Weight functions A : [1,inf) -> [0,inf), strictly increasing with A(1) = 0,
// classifying degenerate anisotropy. The built-in families:
//
//   affine(p)        A(t) = p (t - 1)
//   almost_linear    A(t) = (t - 1) / (1 + log t)
//   sublinear(eps)   A(t) = (t - 1) / (1 + log t)^{1+eps},  0 < eps <= 2
//   log_weight(p)    A(t) = p log t
//   tabulated        monotone cubic through user samples
//
// The almost-linear family is the borderline: its tail integral of A(t)/t^2
// diverges, while sublinear and log weights have finite tails.

#include <algorithm>
#include <memory>
#include <vector>

#include "calderon/numerics.hpp"

namespace calderon {

enum class GrowthVerdict { diverges, converges, inconclusive };

inline const char* to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::diverges: return "diverges";
    case GrowthVerdict::converges: return "converges";
    default: return "inconclusive";
  }
}

namespace detail {

// Monotone cubic (Fritsch-Carlson) through strictly increasing samples.
class Pchip {
public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw domain_error("Pchip: need >= 2 samples");
    for (size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]) || !(y_[i] > y_[i - 1]))
        throw domain_error("Pchip: samples must be strictly increasing");
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    m_.assign(n, 0.0);
    m_[0] = d[0];
    m_[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) m_[i] = 0.0;
      else m_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);  // harmonic mean
    }
  }

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front() + m_.front() * (t - x_.front());
    if (t >= x_.back()) return y_.back() + m_.back() * (t - x_.back());
    size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin() - 1;
    const double h = x_[i + 1] - x_[i], s = (t - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

private:
  std::vector<double> x_, y_, m_;
};

}  // namespace detail

class WeightGauge {
public:
  enum class Kind { affine, almost_linear, sublinear, log_weight, tabulated };

  static WeightGauge affine(double p) {
    if (p <= 0) throw domain_error("affine weight: p must be positive");
    WeightGauge w(Kind::affine);
    w.p_ = p;
    return w;
  }
  static WeightGauge almost_linear() { return WeightGauge(Kind::almost_linear); }
  static WeightGauge sublinear(double eps) {
    if (eps <= 0 || eps > 2) throw domain_error("sublinear weight: eps in (0,2] required");
    WeightGauge w(Kind::sublinear);
    w.eps_ = eps;
    return w;
  }
  static WeightGauge log_weight(double p) {
    if (p <= 0) throw domain_error("log weight: p must be positive");
    WeightGauge w(Kind::log_weight);
    w.p_ = p;
    return w;
  }
  static WeightGauge tabulated(std::vector<double> t, std::vector<double> a) {
    WeightGauge w(Kind::tabulated);
    if (t.empty() || std::abs(t.front() - 1.0) > 1e-12 || std::abs(a.front()) > 1e-12)
      throw domain_error("tabulated weight: table must start at (1, 0)");
    w.table_t_ = t;
    w.table_a_ = a;
    w.table_ = std::make_shared<detail::Pchip>(std::move(t), std::move(a));
    return w;
  }

  Kind kind() const { return kind_; }
  double param() const { return kind_ == Kind::sublinear ? eps_ : p_; }
  const std::vector<double>& table_abscissae() const { return table_t_; }
  const std::vector<double>& table_values() const { return table_a_; }

  // A(t) for t >= 1.
  double eval(double t) const {
    if (!(t >= 1.0)) throw domain_error("WeightGauge::eval: t >= 1 required");
    switch (kind_) {
      case Kind::affine: return p_ * (t - 1.0);
      case Kind::almost_linear: return (t - 1.0) / (1.0 + std::log(t));
      case Kind::sublinear: return (t - 1.0) / std::pow(1.0 + std::log(t), 1.0 + eps_);
      case Kind::log_weight: return p_ * std::log(t);
      case Kind::tabulated: return (*table_)(t);
    }
    return 0.0;
  }

  // A^{-1}(s) for s >= 0; A^{-1}(0) = 1.
  double inverse(double s) const {
    if (!(s >= 0.0)) throw domain_error("WeightGauge::inverse: s >= 0 required");
    if (s == 0.0) return 1.0;
    switch (kind_) {
      case Kind::affine: return 1.0 + s / p_;
      case Kind::log_weight: return std::exp(s / p_);
      default: break;
    }
    // Monotone kinds without closed-form inverse: bracket and bisect.
    double hi = 2.0;
    int guard = 0;
    while (eval(hi) < s) {
      hi *= 2.0;
      if (++guard > 1200) throw domain_error("WeightGauge::inverse: argument not attained");
    }
    double lo = hi * 0.5 >= 1.0 ? hi * 0.5 : 1.0;
    if (eval(lo) > s) lo = 1.0;
    double x = bisect([&](double t) { return eval(t) - s; }, lo, hi, {1e-14, 400});
    // Newton polish.
    for (int i = 0; i < 4; ++i) {
      const double h = std::max(1e-9, 1e-9 * x);
      const double df = (eval(x + h) - eval(std::max(1.0, x - h))) / (x + h - std::max(1.0, x - h));
      if (df <= 0) break;
      const double step = (eval(x) - s) / df;
      const double xn = x - step;
      if (!(xn >= 1.0) || !std::isfinite(xn)) break;
      x = xn;
    }
    return x;
  }

  // Tail integral  T(V) = int_V^inf A(t)/t^2 dt.  Finite only for the strictly
  // sublinear kinds; throws for affine / almost-linear / tabulated.
  double tail_integral(double V) const {
    if (!(V >= 1.0)) throw domain_error("tail_integral: V >= 1 required");
    switch (kind_) {
      case Kind::log_weight:
        return p_ * (std::log(V) + 1.0) / V;
      case Kind::sublinear: {
        // int (t-1)/t^2 (1+log t)^{-1-eps} dt
        //   = (1/eps)(1+log V)^{-eps} - int_V^inf t^{-2}(1+log t)^{-1-eps} dt,
        // the remainder decays like exp(-u) after t = e^u.
        const double lead = std::pow(1.0 + std::log(V), -eps_) / eps_;
        const double u0 = std::log(V);
        const double rem = integrate(
            [&](double u) { return std::exp(-u) * std::pow(1.0 + u, -1.0 - eps_); }, u0,
            u0 + 45.0, 1e-14);
        return lead - rem;
      }
      default:
        throw domain_error("tail_integral: weight has a divergent or unknown tail");
    }
  }

  // J(a) = int_a^inf du / Ainv((1+u)/1), with the substitution v = A^{-1}(1+u):
  // J(a) = T(V) - (1+a)/V at V = A^{-1}(1+a).  Used by the radial blow-up maps.
  double phase_integral_tail(double a) const {
    const double V = inverse(1.0 + a);
    return tail_integral(V) - (1.0 + a) / V;
  }

private:
  explicit WeightGauge(Kind k) : kind_(k) {}

  Kind kind_;
  double p_ = 1.0, eps_ = 0.5;
  std::shared_ptr<const detail::Pchip> table_;
  std::vector<double> table_t_, table_a_;
};

// ---------------------------------------------------------------------------
// Growth classification: the ladder of partial integrals int_1^T A(t)/t^2 dt
// together with samples of t A'(t).

struct GrowthReport {
  std::vector<double> T;                  // geometric ladder
  std::vector<double> divergence_estimate;  // cumulative integral at each T
  std::vector<double> derivative_growth;    // t A'(t) samples
  GrowthVerdict verdict = GrowthVerdict::inconclusive;
  double increment_slope = 0.0;  // fitted log-log slope of ladder increments
};

inline GrowthReport classify_growth(const WeightGauge& w, double T_max) {
  if (!(T_max >= 1e3)) throw domain_error("classify_growth: T_max >= 1e3 required");
  GrowthReport rep;
  std::vector<double> increments;
  double T_prev = 1.0, total = 0.0;
  for (double T = 2.0;; T *= 2.0) {
    if (T > T_max) T = T_max;
    // Integrate A(t)/t^2 over [T_prev, T] in the variable u = log t.
    const double inc = integrate(
        [&](double u) { const double t = std::exp(u); return w.eval(t) / t; },
        std::log(T_prev), std::log(T), 1e-12);
    total += inc;
    increments.push_back(inc);
    rep.T.push_back(T);
    rep.divergence_estimate.push_back(total);
    const double h = 1e-5;
    rep.derivative_growth.push_back((w.eval(T * (1 + h)) - w.eval(std::max(1.0, T * (1 - h)))) /
                                    (2.0 * h));
    if (T >= T_max) break;
    T_prev = T;
  }

  const size_t n = increments.size();
  if (n >= 3 && increments.back() < 1e-6 * std::max(total, 1e-300) &&
      increments[n - 1] <= increments[n - 2]) {
    rep.verdict = GrowthVerdict::converges;
    return rep;
  }
  // Fit the decay exponent of the increments against the rung index: the
  // integral converges iff increments ~ j^s are summable, i.e. s < -1.
  std::vector<double> lx, ly;
  for (size_t j = n / 2; j < n; ++j) {
    if (increments[j] <= 0) continue;
    lx.push_back(std::log(double(j + 1)));
    ly.push_back(std::log(increments[j]));
  }
  if (lx.size() < 3) {
    rep.verdict = GrowthVerdict::inconclusive;
    return rep;
  }
  const LineFit fit = fit_line(lx, ly);
  rep.increment_slope = fit.slope;
  if (fit.slope > -1.05)
    rep.verdict = GrowthVerdict::diverges;
  else if (fit.slope < -1.2)
    rep.verdict = GrowthVerdict::converges;
  else
    rep.verdict = GrowthVerdict::inconclusive;
  return rep;
}

}  // namespace calderon
