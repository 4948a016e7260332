#pragma once

// Integral curves of the current -sigma grad u over a FEM solution, RK4 on
// the piecewise-constant flux field.

#include "calderon/fem.hpp"

namespace calderon {

struct StreamOptions {
  double step = 0.01;
  int max_steps = 4000;
};

inline std::vector<std::vector<cplx>> current_lines(const FemSolution& sol,
                                                    const ConductivityField& sigma,
                                                    const std::vector<cplx>& seeds,
                                                    StreamOptions opt = {}) {
  const TriMesh& mesh = *sol.mesh;
  auto field = [&](cplx p) -> cplx {
    const int t = mesh.locate(p);
    if (t < 0) return cplx(0, 0);
    const Sym2 s = sigma.at(mesh.centroid(t));
    const cplx g = sol.grad[t];
    return cplx(-(s.a11 * g.real() + s.a12 * g.imag()), -(s.a12 * g.real() + s.a22 * g.imag()));
  };
  std::vector<std::vector<cplx>> lines;
  for (cplx seed : seeds) {
    if (mesh.locate(seed) < 0)
      throw domain_error("current_lines: seed outside the mesh");
    std::vector<cplx> line{seed};
    cplx p = seed;
    if (std::abs(field(p)) == 0.0) {
      lines.push_back(std::move(line));
      continue;
    }
    for (int i = 0; i < opt.max_steps; ++i) {
      auto unit = [&](cplx v) { const double a = std::abs(v); return a > 1e-300 ? v / a : cplx(0, 0); };
      const cplx k1 = unit(field(p));
      if (k1 == cplx(0, 0)) break;
      const cplx k2 = unit(field(p + 0.5 * opt.step * k1));
      const cplx k3 = unit(field(p + 0.5 * opt.step * k2));
      const cplx k4 = unit(field(p + opt.step * k3));
      const cplx dp = opt.step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (std::abs(dp) < 1e-14) break;
      p += dp;
      if (mesh.locate(p) < 0) break;
      line.push_back(p);
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace calderon
