#pragma once

// Structured polar triangulations of the disc B(2) and of annuli with an
// excised core, with geometric grading toward singular circles.  The mesh
// keeps its ring structure so that point location is O(log n_rings).

#include <array>
#include <fstream>
#include <sstream>

#include "calderon/numerics.hpp"

namespace calderon {

struct TriMesh {
  std::vector<cplx> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<int> boundary;                  // outer boundary, ordered by angle

  // polar structure (rings[0] may be 0 for a full disc with center vertex)
  std::vector<double> rings;
  int n_theta = 0;
  bool has_center = false;

  double inner_radius() const { return has_center ? 0.0 : rings.front(); }

  int ring_vertex(int ring, int j) const {
    // ring counts exclude the center vertex; j wraps around
    const int base = has_center ? 1 : 0;
    const int jj = ((j % n_theta) + n_theta) % n_theta;
    return base + ring * n_theta + jj;
  }

  double area(int t) const {
    const auto& tri = triangles[t];
    const cplx a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    return 0.5 * ((b.real() - a.real()) * (c.imag() - a.imag()) -
                  (b.imag() - a.imag()) * (c.real() - a.real()));
  }

  cplx centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  // Locate the triangle containing p through the ring structure; returns -1
  // outside the mesh.
  int locate(cplx p) const;
};

// Radial breakpoints on [r_in, r_out] with target spacing h_base, refined
// geometrically (ratio `grade`) toward each radius in `attract` down to
// spacing h_min.
inline std::vector<double> graded_radii(double r_in, double r_out, double h_base,
                                        const std::vector<double>& attract, double grade = 0.7,
                                        double h_min = 1e-3) {
  std::vector<double> pts;
  for (double r = r_in; r < r_out - 0.5 * h_base; r += h_base) pts.push_back(r);
  pts.push_back(r_out);
  for (double rs : attract) {
    double d = h_base;
    while (d > h_min) {
      d *= grade;
      for (double side : {rs - d, rs + d})
        if (side > r_in + 1e-12 && side < r_out - 1e-12) pts.push_back(side);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double a, double b) { return b - a < 0.25 * h_min; }),
            pts.end());
  if (std::abs(pts.back() - r_out) > 1e-12) pts.push_back(r_out);
  pts.front() = r_in;
  return pts;
}

// Structured polar mesh: rings at the given radii, n_theta sectors.  If
// radii[0] == 0 the mesh is a full disc with a center vertex and a fan.
inline TriMesh make_polar_mesh(std::vector<double> radii, int n_theta) {
  if (radii.size() < 2 || n_theta < 8) throw domain_error("make_polar_mesh: degenerate spec");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw domain_error("make_polar_mesh: radii must increase");

  TriMesh m;
  m.n_theta = n_theta;
  m.has_center = radii.front() == 0.0;
  if (m.has_center) {
    m.vertices.push_back(cplx(0.0, 0.0));
    radii.erase(radii.begin());
  }
  m.rings = radii;
  const int n_rings = int(radii.size());
  for (int i = 0; i < n_rings; ++i)
    for (int j = 0; j < n_theta; ++j)
      m.vertices.push_back(std::polar(radii[i], 2.0 * pi * j / n_theta));

  if (m.has_center) {
    for (int j = 0; j < n_theta; ++j)
      m.triangles.push_back({0, m.ring_vertex(0, j), m.ring_vertex(0, j + 1)});
  }
  for (int i = 0; i + 1 < n_rings; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      const int a = m.ring_vertex(i, j), b = m.ring_vertex(i, j + 1);
      const int c = m.ring_vertex(i + 1, j), d = m.ring_vertex(i + 1, j + 1);
      // CCW quad order is a, c, d, b; alternate the split diagonal
      if ((i + j) % 2 == 0) {
        m.triangles.push_back({a, c, d});
        m.triangles.push_back({a, d, b});
      } else {
        m.triangles.push_back({a, c, b});
        m.triangles.push_back({c, d, b});
      }
    }
  }
  for (int j = 0; j < n_theta; ++j) m.boundary.push_back(m.ring_vertex(n_rings - 1, j));
  return m;
}

inline int TriMesh::locate(cplx p) const {
  const double r = std::abs(p);
  if (r > rings.back() + 1e-12) return -1;
  if (!has_center && r < rings.front() - 1e-12) return -1;
  // ring band index
  int band;  // -1 = center fan
  if (has_center && r <= rings.front())
    band = -1;
  else {
    band = int(std::upper_bound(rings.begin(), rings.end(), r) - rings.begin()) - 1;
    band = std::min(band, int(rings.size()) - 2);
    band = std::max(band, 0);
  }
  double th = std::arg(p);
  if (th < 0) th += 2 * pi;
  const int j = std::min(n_theta - 1, int(th / (2 * pi / n_theta)));
  // candidate triangles from the estimated band and its neighbours (polygon
  // chords undercut the circular rings); fan triangles precede the bands.
  const int fan = has_center ? n_theta : 0;
  const int n_bands = int(rings.size()) - 1;
  std::vector<int> cand;
  for (int db = -1; db <= 1; ++db) {
    const int bb = band + db;
    if (bb == -1 && has_center) {
      for (int dj = -1; dj <= 1; ++dj) cand.push_back(((j + dj) % n_theta + n_theta) % n_theta);
    } else if (bb >= 0 && bb < n_bands) {
      const int base = fan + bb * 2 * n_theta;
      for (int dj = -1; dj <= 1; ++dj) {
        const int jj = ((j + dj) % n_theta + n_theta) % n_theta;
        cand.push_back(base + 2 * jj);
        cand.push_back(base + 2 * jj + 1);
      }
    }
  }
  for (int t : cand) {
    if (t < 0 || t >= int(triangles.size())) continue;
    const auto& tri = triangles[t];
    const cplx a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    const double d = ((b - a).real() * (c - a).imag() - (b - a).imag() * (c - a).real());
    const double l1 = ((p - a).real() * (c - a).imag() - (p - a).imag() * (c - a).real()) / d;
    const double l2 = ((b - a).real() * (p - a).imag() - (b - a).imag() * (p - a).real()) / d;
    if (l1 >= -1e-10 && l2 >= -1e-10 && l1 + l2 <= 1.0 + 1e-10) return t;
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Plain ASCII mesh format: counts header, vertex lines, triangle lines.

inline void write_mesh(std::ostream& os, const TriMesh& m) {
  os << m.vertices.size() << " " << m.triangles.size() << " " << m.boundary.size() << "\n";
  os.precision(17);
  for (const auto& v : m.vertices) os << v.real() << " " << v.imag() << "\n";
  for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (size_t i = 0; i < m.boundary.size(); ++i)
    os << m.boundary[i] << (i + 1 == m.boundary.size() ? "\n" : " ");
}

inline TriMesh read_mesh(std::istream& is) {
  TriMesh m;
  size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw io_error("read_mesh: bad header");
  m.vertices.resize(nv);
  for (auto& v : m.vertices) {
    double x, y;
    if (!(is >> x >> y)) throw io_error("read_mesh: bad vertex line");
    v = cplx(x, y);
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw io_error("read_mesh: bad triangle line");
  m.boundary.resize(nb);
  for (auto& b : m.boundary)
    if (!(is >> b)) throw io_error("read_mesh: bad boundary line");
  return m;
}

}  // namespace calderon
