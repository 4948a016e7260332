#pragma once

// Deterministic SVG rendering of FEM solutions and grid fields on the
// viewBox [-2,2]^2, with optional streamline overlays.

#include <cstdio>

#include "calderon/fem.hpp"

namespace calderon {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// compact 8-stop perceptual colormap (dark blue -> yellow)
inline std::string colormap(double t) {
  static const double stops[8][3] = {{68, 1, 84},    {70, 50, 127},  {54, 92, 141},
                                     {39, 127, 142}, {31, 161, 135}, {74, 194, 109},
                                     {159, 218, 58}, {253, 231, 37}};
  t = std::min(1.0, std::max(0.0, t));
  const double x = t * 7.0;
  const int i = std::min(6, int(x));
  const double s = x - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                int(stops[i][0] + s * (stops[i + 1][0] - stops[i][0])),
                int(stops[i][1] + s * (stops[i + 1][1] - stops[i][1])),
                int(stops[i][2] + s * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace detail

struct SvgOptions {
  int size_px = 640;
  double stroke_width = 0.012;
};

inline std::string render_solution_svg(const FemSolution& sol,
                                       const std::vector<std::vector<cplx>>& streamlines = {},
                                       SvgOptions opt = {}) {
  const TriMesh& mesh = *sol.mesh;
  if (sol.u.size() == 0) throw domain_error("render: empty solution");
  double lo = sol.u.minCoeff(), hi = sol.u.maxCoeff();
  if (hi <= lo) hi = lo + 1.0;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.size_px) +
         "\" height=\"" + std::to_string(opt.size_px) +
         "\" viewBox=\"-2 -2 4 4\">\n<g transform=\"scale(1,-1)\">\n";
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double val =
        (sol.u[tri[0]] + sol.u[tri[1]] + sol.u[tri[2]]) / 3.0;
    out += "<polygon points=\"";
    for (int i = 0; i < 3; ++i) {
      const cplx p = mesh.vertices[tri[i]];
      out += detail::fmt(p.real()) + "," + detail::fmt(p.imag()) + (i < 2 ? " " : "");
    }
    out += "\" fill=\"" + detail::colormap((val - lo) / (hi - lo)) + "\"/>\n";
  }
  for (const auto& line : streamlines) {
    if (line.size() < 2) continue;
    out += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" +
           detail::fmt(opt.stroke_width) + "\" points=\"";
    for (size_t i = 0; i < line.size(); ++i)
      out += detail::fmt(line[i].real()) + "," + detail::fmt(line[i].imag()) +
             (i + 1 < line.size() ? " " : "");
    out += "\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline std::string render_grid_svg(const GridField& f, SvgOptions opt = {}) {
  if (f.N() == 0) throw domain_error("render: empty field");
  double lo = 1e300, hi = -1e300;
  for (const auto& v : f.data()) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  if (hi <= lo) hi = lo + 1.0;
  const double h = f.spacing();
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.size_px) +
         "\" height=\"" + std::to_string(opt.size_px) +
         "\" viewBox=\"-2 -2 4 4\">\n<g transform=\"scale(1,-1)\">\n";
  for (int iy = 0; iy < f.N(); ++iy)
    for (int ix = 0; ix < f.N(); ++ix) {
      const cplx p = f.point(ix, iy);
      if (std::abs(p) > 2.0 + h) continue;
      out += "<rect x=\"" + detail::fmt(p.real()) + "\" y=\"" + detail::fmt(p.imag()) +
             "\" width=\"" + detail::fmt(h) + "\" height=\"" + detail::fmt(h) + "\" fill=\"" +
             detail::colormap((f(ix, iy).real() - lo) / (hi - lo)) + "\"/>\n";
    }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace calderon
