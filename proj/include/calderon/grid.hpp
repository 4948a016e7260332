#pragma once

// Square complex sample grids on [-R, R)^2 (row-major, power-of-two side),
// the discretization carrier for Beltrami coefficients, principal solutions
// and CGO fields.

#include <vector>

#include "calderon/numerics.hpp"

namespace calderon {

class GridField {
public:
  GridField() = default;
  GridField(int N, double R) : N_(N), R_(R), v_(size_t(N) * N, cplx(0, 0)) {
    if (N < 2 || (N & (N - 1)) != 0) throw domain_error("GridField: N must be a power of two");
    if (!(R > 0)) throw domain_error("GridField: R must be positive");
  }

  template <typename F>
  static GridField sample(int N, double R, F&& f) {
    GridField g(N, R);
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) g(ix, iy) = f(g.point(ix, iy));
    return g;
  }

  int N() const { return N_; }
  double R() const { return R_; }
  double spacing() const { return 2.0 * R_ / N_; }
  double cell_area() const { return spacing() * spacing(); }

  cplx point(int ix, int iy) const {
    return cplx(-R_ + ix * spacing(), -R_ + iy * spacing());
  }

  cplx& operator()(int ix, int iy) { return v_[size_t(iy) * N_ + ix]; }
  cplx operator()(int ix, int iy) const { return v_[size_t(iy) * N_ + ix]; }
  std::vector<cplx>& data() { return v_; }
  const std::vector<cplx>& data() const { return v_; }

  // Bilinear interpolation, clamped to the grid box.
  cplx interpolate(cplx z) const {
    const double h = spacing();
    double fx = (z.real() + R_) / h, fy = (z.imag() + R_) / h;
    fx = std::min(std::max(fx, 0.0), double(N_ - 1) - 1e-12);
    fy = std::min(std::max(fy, 0.0), double(N_ - 1) - 1e-12);
    const int ix = int(fx), iy = int(fy);
    const double tx = fx - ix, ty = fy - iy;
    return (1 - tx) * (1 - ty) * (*this)(ix, iy) + tx * (1 - ty) * (*this)(ix + 1, iy) +
           (1 - tx) * ty * (*this)(ix, iy + 1) + tx * ty * (*this)(ix + 1, iy + 1);
  }

  double norm_l2() const {
    double s = 0;
    for (const auto& x : v_) s += std::norm(x);
    return std::sqrt(s * cell_area());
  }
  double norm_max() const {
    double s = 0;
    for (const auto& x : v_) s = std::max(s, std::abs(x));
    return s;
  }
  double support_radius() const {
    double s = 0;
    for (int iy = 0; iy < N_; ++iy)
      for (int ix = 0; ix < N_; ++ix)
        if ((*this)(ix, iy) != cplx(0, 0)) s = std::max(s, std::abs(point(ix, iy)));
    return s;
  }

  GridField& operator+=(const GridField& o) {
    check_same(o);
    for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  GridField& operator-=(const GridField& o) {
    check_same(o);
    for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  GridField& operator*=(cplx c) {
    for (auto& x : v_) x *= c;
    return *this;
  }

  void check_same(const GridField& o) const {
    if (o.N_ != N_ || o.R_ != R_) throw domain_error("GridField: shape mismatch");
  }

private:
  int N_ = 0;
  double R_ = 0;
  std::vector<cplx> v_;
};

inline double distance_l2(const GridField& a, const GridField& b) {
  a.check_same(b);
  double s = 0;
  for (size_t i = 0; i < a.data().size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s * a.cell_area());
}

}  // namespace calderon
