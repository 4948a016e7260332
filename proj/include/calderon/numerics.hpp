#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace calderon {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error taxonomy mirrored by the CLI exit codes: domain/validation -> 2,
// convergence -> 3, I/O -> 4.
class domain_error : public std::invalid_argument {
public:
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

class convergence_error : public std::runtime_error {
public:
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Small dense 2x2 types.

struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

  double det() const { return a11 * a22 - a12 * a21; }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }
  Mat2 inverse() const {
    const double d = det();
    if (d == 0.0) throw domain_error("Mat2::inverse: singular matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  // Largest singular value (operator norm).
  double norm() const {
    const double a = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    const double d = det();
    const double h = std::sqrt(std::max(0.0, a * a / 4.0 - d * d));
    return std::sqrt(a / 2.0 + h);
  }
  double frobenius() const {
    return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
  }
};

inline Mat2 operator*(const Mat2& A, const Mat2& B) {
  return {A.a11 * B.a11 + A.a12 * B.a21, A.a11 * B.a12 + A.a12 * B.a22,
          A.a21 * B.a11 + A.a22 * B.a21, A.a21 * B.a12 + A.a22 * B.a22};
}
inline Mat2 operator*(double s, const Mat2& A) {
  return {s * A.a11, s * A.a12, s * A.a21, s * A.a22};
}

struct Sym2 {
  double a11 = 0, a12 = 0, a22 = 0;

  static Sym2 identity() { return {1.0, 0.0, 1.0}; }
  static Sym2 diag(double l1, double l2) { return {l1, 0.0, l2}; }

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a12; }

  // Eigenvalues in decreasing order, closed form.
  std::pair<double, double> eigenvalues() const {
    const double m = 0.5 * (a11 + a22);
    const double d = std::hypot(0.5 * (a11 - a22), a12);
    return {m + d, m - d};
  }

  Sym2 inverse() const {
    const double d = det();
    if (d == 0.0) throw domain_error("Sym2::inverse: singular matrix");
    return {a22 / d, -a12 / d, a11 / d};
  }

  Mat2 full() const { return {a11, a12, a12, a22}; }

  bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a22);
  }
};

inline Sym2 operator*(double s, const Sym2& m) { return {s * m.a11, s * m.a12, s * m.a22}; }
inline Sym2 operator+(const Sym2& a, const Sym2& b) {
  return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
}

// sigma in the polar frame at z: radial eigenvalue lr, tangential lt.
inline Sym2 polar_frame(cplx z, double lr, double lt) {
  const double r = std::abs(z);
  if (r == 0.0) throw domain_error("polar_frame: undefined at the origin");
  const double c = z.real() / r, s = z.imag() / r;
  return {lr * c * c + lt * s * s, (lr - lt) * c * s, lr * s * s + lt * c * c};
}

// Conjugation R(theta) m R(theta)^t.
inline Sym2 rotate(const Sym2& m, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double b11 = c * m.a11 - s * m.a12, b12 = c * m.a12 - s * m.a22;
  const double b21 = s * m.a11 + c * m.a12, b22 = s * m.a12 + c * m.a22;
  return {b11 * c - b12 * s, b11 * s + b12 * c, b21 * s + b22 * c};
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.

namespace detail {
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-12, int depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(1.0, std::abs(whole));
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol * scale, depth);
}

// ---------------------------------------------------------------------------
// Scalar root bracketing + bisection, fixed budget for reproducibility.

struct RootOptions {
  double rel_tol = 1e-8;
  int max_iter = 200;
};

// f must be monotone increasing across the bracket; returns x with f(x) ~ 0.
template <typename F>
double bisect(const F& f, double lo, double hi, RootOptions opt = {}) {
  double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0)
    throw domain_error("bisect: endpoints do not bracket a root");
  for (int i = 0; i < opt.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm <= 0.0) lo = mid; else hi = mid;
    if (hi - lo <= opt.rel_tol * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Least-squares line fit, used by the divergence ladders and decay fits.

struct LineFit {
  double slope = 0, intercept = 0, r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw domain_error("fit_line: need >= 2 points");
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw domain_error("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

// Aitken delta-squared acceleration of the last three ladder values.
inline double aitken(double x0, double x1, double x2) {
  const double d = x2 - 2.0 * x1 + x0;
  if (std::abs(d) < 1e-300) return x2;
  const double acc = x2 - (x2 - x1) * (x2 - x1) / d;
  return std::isfinite(acc) ? acc : x2;
}

inline cplx aitken(cplx x0, cplx x1, cplx x2) {
  const cplx d = x2 - 2.0 * x1 + x0;
  if (std::abs(d) < 1e-300) return x2;
  const cplx acc = x2 - (x2 - x1) * (x2 - x1) / d;
  return std::isfinite(acc.real()) && std::isfinite(acc.imag()) ? acc : x2;
}

}  // namespace calderon
