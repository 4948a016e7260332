#pragma once

// Discrete Beurling and Cauchy transforms as Fourier multipliers on the
// periodic grid: S has multiplier conj(xi)/xi, C (the solid Cauchy
// transform, the right inverse of dbar) has -2i/xi.  Both map the zero
// frequency to 0; for C the mean is restored as the explicit primitive
// mean(g) * conj(z), since the mean-free periodic kernel is
// 1/(pi z) - conj(z)/|cell| and would otherwise bias the far field by a
// linear term.  With this convention dbar(C g) = g exactly on the grid and
// C g matches the decaying whole-plane transform for mean-small fields.
//
// By default the field is zero-padded into a doubled box before the
// multiplier is applied, which shrinks the lattice-periodization error of
// the whole-plane kernels by ~16x; pad=false applies the bare periodic
// multiplier (exactly diagonal on grid plane waves).

#include "calderon/fft.hpp"
#include "calderon/grid.hpp"

namespace calderon {

struct TransformOptions {
  bool pad = true;
};

namespace detail {

enum class Multiplier { beurling, cauchy };

inline GridField apply_multiplier(const GridField& g, Multiplier which, TransformOptions opt) {
  if (g.N() < 128) throw domain_error("transform: N >= 128 required");
  const int N = g.N();
  const int M = opt.pad ? 2 * N : N;
  const double Rbox = opt.pad ? 2.0 * g.R() : g.R();
  std::vector<cplx> buf(size_t(M) * M, cplx(0, 0));
  const int off = opt.pad ? N / 2 : 0;
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) buf[size_t(iy + off) * M + (ix + off)] = g(ix, iy);

  fft::forward(buf, M);
  const double dk = pi / Rbox;
  for (int my = 0; my < M; ++my) {
    const int ky = my < M / 2 ? my : my - M;
    for (int mx = 0; mx < M; ++mx) {
      const int kx = mx < M / 2 ? mx : mx - M;
      cplx& v = buf[size_t(my) * M + mx];
      if (kx == 0 && ky == 0) {
        v = 0.0;
        continue;
      }
      const cplx xi(dk * kx, dk * ky);
      v *= (which == Multiplier::beurling) ? std::conj(xi) / xi : cplx(0, -2.0) / xi;
    }
  }
  fft::inverse(buf, M);

  GridField out(N, g.R());
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) out(ix, iy) = buf[size_t(iy + off) * M + (ix + off)];
  if (which == Multiplier::cauchy) {
    // The periodized kernel is 1/(pi w) - conj(w)/|cell| (+ higher lattice
    // corrections suppressed by the padding).  Restoring the whole-plane
    // transform therefore needs both the mean term conj(k) int g / |cell|
    // and the constant conjugate-first-moment term.
    cplx mean(0, 0), moment(0, 0);
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        mean += g(ix, iy);
        moment += std::conj(g.point(ix, iy)) * g(ix, iy);
      }
    const double cell = 4.0 * Rbox * Rbox;
    mean *= g.cell_area() / cell;
    moment *= g.cell_area() / cell;
    if (mean != cplx(0, 0) || moment != cplx(0, 0))
      for (int iy = 0; iy < N; ++iy)
        for (int ix = 0; ix < N; ++ix)
          out(ix, iy) += mean * std::conj(out.point(ix, iy)) - moment;
  }
  return out;
}

}  // namespace detail

inline GridField beurling_S(const GridField& g, TransformOptions opt = {}) {
  return detail::apply_multiplier(g, detail::Multiplier::beurling, opt);
}

inline GridField cauchy_C(const GridField& g, TransformOptions opt = {}) {
  return detail::apply_multiplier(g, detail::Multiplier::cauchy, opt);
}

}  // namespace calderon
