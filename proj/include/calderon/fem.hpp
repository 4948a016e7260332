#pragma once

// P1 Galerkin solver for div(sigma grad u) = 0 on the disc B(2) with
// Dirichlet data on the outer boundary, the associated quadratic-form
// energies, the excision ladder for degenerate cores (natural inner boundary
// condition), DN matrices on the Fourier basis, conjugate fields, and the
// boundary Hilbert transform.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "calderon/conductivity.hpp"
#include "calderon/mesh.hpp"

namespace calderon {

struct DirichletData {
  struct Mode {
    int n;
    double an, bn;
  };
  double a0 = 0.0;
  std::vector<Mode> modes;

  double eval(double theta) const {
    double v = a0;
    for (const auto& m : modes) v += m.an * std::cos(m.n * theta) + m.bn * std::sin(m.n * theta);
    return v;
  }
  static DirichletData cosine(int n, double amp = 1.0) {
    DirichletData h;
    if (n == 0) h.a0 = amp;
    else h.modes.push_back({n, amp, 0.0});
    return h;
  }
  static DirichletData sine(int n, double amp = 1.0) {
    DirichletData h;
    h.modes.push_back({n, 0.0, amp});
    return h;
  }
};

struct FemOptions {
  int quadrature_points = 3;  // 1 (centroid) or 3 (edge midpoints)
};

struct FemSolution {
  std::shared_ptr<const TriMesh> mesh;
  Eigen::VectorXd u;                // nodal values
  std::vector<cplx> grad;           // constant per-element gradient (gx, gy)
  double energy = 0.0;

  cplx gradient_at(int tri) const { return grad[tri]; }
};

class FemSolver {
public:
  FemSolver(std::shared_ptr<const TriMesh> mesh, const ConductivityField& sigma,
            FemOptions opt = {})
      : mesh_(std::move(mesh)), opt_(opt) {
    assemble(sigma);
    factorize();
  }

  const TriMesh& mesh() const { return *mesh_; }
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }

  Eigen::VectorXd boundary_values(const DirichletData& h) const {
    Eigen::VectorXd g(mesh_->boundary.size());
    for (size_t i = 0; i < mesh_->boundary.size(); ++i)
      g[i] = h.eval(std::arg(mesh_->vertices[mesh_->boundary[i]]));
    return g;
  }

  FemSolution solve(const DirichletData& h) const { return solve(boundary_values(h)); }

  FemSolution solve(const Eigen::VectorXd& boundary_vals) const {
    const int n = int(mesh_->vertices.size());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (size_t i = 0; i < mesh_->boundary.size(); ++i)
      u[mesh_->boundary[i]] = boundary_vals[i];
    // rhs = -K_IB u_B restricted to interior nodes
    Eigen::VectorXd r = -(K_ * u);
    Eigen::VectorXd ri(n_interior_);
    for (int i = 0; i < n; ++i)
      if (interior_index_[i] >= 0) ri[interior_index_[i]] = r[i];
    const Eigen::VectorXd ui = ldlt_.solve(ri);
    if (ldlt_.info() != Eigen::Success)
      throw convergence_error("FemSolver: sparse solve failed");
    for (int i = 0; i < n; ++i)
      if (interior_index_[i] >= 0) u[i] = ui[interior_index_[i]];

    FemSolution sol;
    sol.mesh = mesh_;
    sol.u = u;
    sol.energy = u.dot(K_ * u);
    sol.grad.resize(mesh_->triangles.size());
    for (size_t t = 0; t < mesh_->triangles.size(); ++t) {
      const auto& tri = mesh_->triangles[t];
      const cplx a = mesh_->vertices[tri[0]], b = mesh_->vertices[tri[1]],
                 c = mesh_->vertices[tri[2]];
      const double A2 = 2.0 * mesh_->area(int(t));
      // grad lambda_i = perp(opposite edge)/(2A)
      const cplx g0(-(c - b).imag() / A2, (c - b).real() / A2);
      const cplx g1(-(a - c).imag() / A2, (a - c).real() / A2);
      const cplx g2(-(b - a).imag() / A2, (b - a).real() / A2);
      sol.grad[t] = u[tri[0]] * g0 + u[tri[1]] * g1 + u[tri[2]] * g2;
    }
    return sol;
  }

  double energy_of(const Eigen::VectorXd& u) const { return u.dot(K_ * u); }

  // DN matrix on the basis {1, cos(n th), sin(n th)}_{n<=n_max}: entries are
  // the polarized quadratic form B(h_k, h_l) = u_k^T K u_l.
  Eigen::MatrixXd dn_matrix(int n_max) const {
    std::vector<DirichletData> basis;
    basis.push_back(DirichletData::cosine(0));
    for (int n = 1; n <= n_max; ++n) {
      basis.push_back(DirichletData::cosine(n));
      basis.push_back(DirichletData::sine(n));
    }
    const int m = int(basis.size());
    Eigen::MatrixXd U(mesh_->vertices.size(), m);
    for (int k = 0; k < m; ++k) U.col(k) = solve(basis[k]).u;
    Eigen::MatrixXd B = U.transpose() * (K_ * U);
    return 0.5 * (B + B.transpose());  // symmetrize roundoff
  }

private:
  void assemble(const ConductivityField& sigma) {
    const int n = int(mesh_->vertices.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh_->triangles.size() * 9);
    for (size_t t = 0; t < mesh_->triangles.size(); ++t) {
      const auto& tri = mesh_->triangles[t];
      const cplx a = mesh_->vertices[tri[0]], b = mesh_->vertices[tri[1]],
                 c = mesh_->vertices[tri[2]];
      const double A = mesh_->area(int(t));
      if (!(A > 0)) throw domain_error("FemSolver: non-positive triangle");
      const double A2 = 2.0 * A;
      const cplx g[3] = {cplx(-(c - b).imag() / A2, (c - b).real() / A2),
                         cplx(-(a - c).imag() / A2, (a - c).real() / A2),
                         cplx(-(b - a).imag() / A2, (b - a).real() / A2)};
      std::vector<std::pair<cplx, double>> qp;  // point, weight
      if (opt_.quadrature_points == 1) {
        qp = {{(a + b + c) / 3.0, A}};
      } else {
        qp = {{0.5 * (a + b), A / 3}, {0.5 * (b + c), A / 3}, {0.5 * (c + a), A / 3}};
      }
      double Ke[3][3] = {};
      for (const auto& [p, w] : qp) {
        Sym2 s;
        try {
          s = sigma.at(p);
        } catch (const domain_error&) {
          throw domain_error(
              "FemSolver: degenerate coefficient inside the mesh; excise the core and use "
              "regularized_dn_form");
        }
        for (int i = 0; i < 3; ++i) {
          const double sx = s.a11 * g[i].real() + s.a12 * g[i].imag();
          const double sy = s.a12 * g[i].real() + s.a22 * g[i].imag();
          for (int j = 0; j < 3; ++j)
            Ke[i][j] += w * (sx * g[j].real() + sy * g[j].imag());
        }
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], Ke[i][j]);
    }
    K_.resize(n, n);
    K_.setFromTriplets(trip.begin(), trip.end());
  }

  void factorize() {
    const int n = int(mesh_->vertices.size());
    interior_index_.assign(n, -1);
    std::vector<bool> is_bdry(n, false);
    for (int b : mesh_->boundary) is_bdry[b] = true;
    n_interior_ = 0;
    for (int i = 0; i < n; ++i)
      if (!is_bdry[i]) interior_index_[i] = n_interior_++;
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < K_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(K_, k); it; ++it) {
        const int i = interior_index_[it.row()], j = interior_index_[it.col()];
        if (i >= 0 && j >= 0) trip.emplace_back(i, j, it.value());
      }
    Eigen::SparseMatrix<double> Kii(n_interior_, n_interior_);
    Kii.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(Kii);
    if (ldlt_.info() != Eigen::Success)
      throw convergence_error("FemSolver: stiffness factorization failed (singular operator)");
  }

  std::shared_ptr<const TriMesh> mesh_;
  FemOptions opt_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  std::vector<int> interior_index_;
  int n_interior_ = 0;
};

// ---------------------------------------------------------------------------
// Convenience drivers.

struct MeshParams {
  int n_theta = 256;
  double h_base = 0.04;
  double h_min = 1e-3;
  double grade = 0.7;
};

inline std::shared_ptr<const TriMesh> make_domain_mesh(const ConductivityField& sigma,
                                                       double hole_radius, MeshParams mp) {
  std::vector<double> attract;
  for (double rs : sigma.singular_radii())
    if (rs > hole_radius + 1e-12 && rs < 2.0 - 1e-12) attract.push_back(rs);
  if (hole_radius > 0.0) attract.push_back(hole_radius);
  auto radii = graded_radii(hole_radius, 2.0, mp.h_base, attract, mp.grade, mp.h_min);
  return std::make_shared<TriMesh>(make_polar_mesh(std::move(radii), mp.n_theta));
}

inline FemSolution solve_dirichlet(const ConductivityField& sigma, const DirichletData& h,
                                   std::shared_ptr<const TriMesh> mesh, FemOptions opt = {}) {
  return FemSolver(std::move(mesh), sigma, opt).solve(h);
}

inline double dn_form(const ConductivityField& sigma, const DirichletData& h,
                      std::shared_ptr<const TriMesh> mesh, FemOptions opt = {}) {
  return solve_dirichlet(sigma, h, std::move(mesh), opt).energy;
}

// Excision ladder: for each r in the (strictly decreasing) ladder, solve on
// the annulus hole_radius(r) < |z| < 2 with the natural (zero Neumann) inner
// condition and extrapolate with the capacity model  Q_r ~ Q - c / log(1/r).
struct LadderPoint {
  double r;            // excision parameter
  double hole_radius;  // excised core radius in the mesh domain
  double Q;
};

struct RegularizedDn {
  std::vector<LadderPoint> ladder;
  double extrapolated = 0.0;
  // The extrapolation model is a modeling choice; recorded in the output.
  std::string model = "Q_r ~ Q - c/log(1/r)";
};

inline RegularizedDn regularized_dn_form(
    const ConductivityField& sigma, const DirichletData& h, const std::vector<double>& r_ladder,
    MeshParams mp = {}, FemOptions opt = {},
    const std::function<double(double)>& hole_radius = [](double r) { return r; }) {
  if (r_ladder.size() < 2) throw domain_error("regularized_dn_form: need at least two rungs");
  for (size_t i = 1; i < r_ladder.size(); ++i)
    if (!(r_ladder[i] < r_ladder[i - 1]))
      throw domain_error("regularized_dn_form: ladder must be strictly decreasing (nested cores)");

  RegularizedDn out;
  for (double r : r_ladder) {
    const double hole = hole_radius(r);
    if (!(hole > 0.0 && hole < 2.0))
      throw domain_error("regularized_dn_form: core radius outside (0,2)");
    auto mesh = make_domain_mesh(sigma, hole, mp);
    out.ladder.push_back({r, hole, dn_form(sigma, h, mesh, opt)});
  }
  const auto& lad = out.ladder;
  const size_t n = lad.size();
  const double L1 = std::log(1.0 / lad[n - 2].r), L2 = std::log(1.0 / lad[n - 1].r);
  const double c = (lad[n - 1].Q - lad[n - 2].Q) / (1.0 / L1 - 1.0 / L2);
  out.extrapolated = lad[n - 1].Q + c / L2;
  return out;
}

// ---------------------------------------------------------------------------
// Conjugate field: nodal v with grad v ~ *sigma grad u in least squares;
// f = u + iv solves the associated first-order system in the discrete sense.

struct ConjugateField {
  Eigen::VectorXd v;
  double residual = 0.0;  // relative L2 mismatch of grad v against the rotated flux
};

inline ConjugateField conjugate_field(const FemSolution& sol, const ConductivityField& sigma) {
  const TriMesh& mesh = *sol.mesh;
  const int n = int(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  double flux_norm = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const cplx a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double A = mesh.area(int(t));
    const double A2 = 2.0 * A;
    const cplx g[3] = {cplx(-(c - b).imag() / A2, (c - b).real() / A2),
                       cplx(-(a - c).imag() / A2, (a - c).real() / A2),
                       cplx(-(b - a).imag() / A2, (b - a).real() / A2)};
    const Sym2 s = sigma.at((a + b + c) / 3.0);
    const cplx gu = sol.grad[t];
    // w = * sigma grad u  (rotation by +90 degrees of the flux)
    const double fx = s.a11 * gu.real() + s.a12 * gu.imag();
    const double fy = s.a12 * gu.real() + s.a22 * gu.imag();
    const cplx w(-fy, fx);
    flux_norm += A * std::norm(w);
    for (int i = 0; i < 3; ++i) {
      rhs[tri[i]] += A * (g[i].real() * w.real() + g[i].imag() * w.imag());
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j],
                          A * (g[i].real() * g[j].real() + g[i].imag() * g[j].imag()));
    }
  }
  // gauge: pin node 0
  Eigen::SparseMatrix<double> L(n, n);
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trip.size());
  for (const auto& tr : trip)
    if (tr.row() != 0 && tr.col() != 0) kept.push_back(tr);
  kept.emplace_back(0, 0, 1.0);
  rhs[0] = 0.0;
  L.setFromTriplets(kept.begin(), kept.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(L);
  if (ldlt.info() != Eigen::Success)
    throw convergence_error("conjugate_field: normal equations not SPD");
  ConjugateField out;
  out.v = ldlt.solve(rhs);
  // residual of grad v against the rotated flux
  double mis = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const cplx a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const double A = mesh.area(int(t));
    const double A2 = 2.0 * A;
    const cplx g0(-(c - b).imag() / A2, (c - b).real() / A2);
    const cplx g1(-(a - c).imag() / A2, (a - c).real() / A2);
    const cplx g2(-(b - a).imag() / A2, (b - a).real() / A2);
    const cplx gv = out.v[tri[0]] * g0 + out.v[tri[1]] * g1 + out.v[tri[2]] * g2;
    const Sym2 s = sigma.at((a + b + c) / 3.0);
    const cplx gu = sol.grad[t];
    const double fx = s.a11 * gu.real() + s.a12 * gu.imag();
    const double fy = s.a12 * gu.real() + s.a22 * gu.imag();
    mis += A * std::norm(gv - cplx(-fy, fx));
  }
  out.residual = flux_norm > 0 ? std::sqrt(mis / flux_norm) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Boundary Hilbert transform from the DN matrix: cumulative arc-length
// integral of Lambda h along |z| = 2 (ds = 2 dtheta), defined mod constants.

struct HilbertResult {
  DirichletData h;     // the transform, mod additive constants
  double winding = 0;  // coefficient of the linear-in-theta part (flux defect)
};

inline HilbertResult hilbert_transform_sigma(const Eigen::MatrixXd& dn, const DirichletData& h) {
  const int n_max = int((dn.rows() - 1) / 2);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dn.rows());
  c[0] = h.a0;
  for (const auto& m : h.modes) {
    if (m.n > n_max) throw domain_error("hilbert_transform_sigma: mode beyond DN matrix order");
    c[2 * m.n - 1] = m.an;
    c[2 * m.n] = m.bn;
  }
  const Eigen::VectorXd Lc = dn * c;
  // Expand Lambda h in the same basis: entry k of Lc is (h_k, Lambda h) on
  // the radius-2 circle, with ||1||^2 = 4 pi, ||cos n th||^2 = 2 pi.
  const double lam0 = Lc[0] / (4.0 * pi);
  HilbertResult out;
  out.winding = 2.0 * lam0;
  for (int n = 1; n <= n_max; ++n) {
    const double an = Lc[2 * n - 1] / (2.0 * pi);
    const double bn = Lc[2 * n] / (2.0 * pi);
    // int_0^theta (an cos + bn sin)(n t) * 2 dt, constants dropped
    out.h.modes.push_back({n, -2.0 * bn / n, 2.0 * an / n});
  }
  return out;
}

}  // namespace calderon
