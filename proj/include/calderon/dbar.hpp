#pragma once

// The k-plane dbar machinery: u1/u2 assembly from CGO pairs, the truncated
// dbar_k integral equation per z-probe, recovery of mu from CGO fields, the
// full sigma -> tau -> sigma_rec round trip for isotropic phantoms, and
// isothermal flattening of anisotropic conductivities.

#include <chrono>
#include <random>

#include "calderon/beltrami.hpp"
#include "calderon/cgo.hpp"
#include "calderon/conductivity.hpp"
#include "calderon/maps.hpp"

namespace calderon {

// ---------------------------------------------------------------------------
// u^(1), u^(2) from the CGO pair:
//   h+ = (f_mu + f_-mu)/2,  h- = (i/2)(conj f_mu - conj f_-mu),
//   u1 = h+ - i h-,         u2 = -h- + i h+.

struct U12 {
  GridField u1, u2;
};

inline U12 assemble_u12(const GridField& f_plus, const GridField& f_minus) {
  f_plus.check_same(f_minus);
  U12 out{GridField(f_plus.N(), f_plus.R()), GridField(f_plus.N(), f_plus.R())};
  for (size_t i = 0; i < f_plus.data().size(); ++i) {
    const cplx hp = 0.5 * (f_plus.data()[i] + f_minus.data()[i]);
    const cplx hm = cplx(0, 0.5) * (std::conj(f_plus.data()[i]) - std::conj(f_minus.data()[i]));
    out.u1.data()[i] = hp - cplx(0, 1) * hm;
    out.u2.data()[i] = -hm + cplx(0, 1) * hp;
  }
  return out;
}

// Inverse of the assembly: f_{+-mu} = h+ +- i conj(h-), with
// h+ = (u1 - i u2)/2 and h- = (i u1 - u2)/2.
inline std::pair<cplx, cplx> cgo_pair_from_u12(cplx u1, cplx u2) {
  const cplx hp = 0.5 * (u1 - cplx(0, 1) * u2);
  const cplx hm = 0.5 * (cplx(0, 1) * u1 - u2);
  return {hp + cplx(0, 1) * std::conj(hm), hp - cplx(0, 1) * std::conj(hm)};
}

// ---------------------------------------------------------------------------
// Truncated scattering data on a k-grid.  tau lives on the 2K_max-box
// [-K_max, K_max)^2 and vanishes outside |k| <= K_max (the regularizing
// truncation); the padded transforms supply the convolution margin.

struct KPlaneOptions {
  double K_max = 8.0;
  int grid_N = 128;
  int max_iter = 100;
  double tol = 1e-10;
  TransformOptions transform;
};

struct DbarSolution {
  cplx z;
  GridField m;   // m(z, .) on the k-grid, u1 = e^{ikz} m
  int iterations = 0;
  double update_norm = 0.0;
};

// Solve m = 1 + C_k[ -i tau(k) e_{-k}(z) conj(m) ] by Picard iteration.
// warm_start (e.g. the solution at a neighbouring probe) cuts the iteration
// count when sweeping a z-grid.
inline DbarSolution solve_dbar_k(const GridField& tau, cplx z, const KPlaneOptions& opt = {},
                                 const GridField* warm_start = nullptr) {
  const int N = tau.N();
  DbarSolution sol;
  sol.z = z;
  if (tau.norm_max() == 0.0) {  // free data: u = e^{ikz} exactly
    sol.m = GridField(N, tau.R());
    for (auto& v : sol.m.data()) v = 1.0;
    sol.iterations = 0;
    return sol;
  }
  if (warm_start && warm_start->N() == N && warm_start->R() == tau.R()) {
    sol.m = *warm_start;
  } else {
    sol.m = GridField(N, tau.R());
    for (auto& v : sol.m.data()) v = 1.0;
  }

  GridField rhs(N, tau.R());
  // phase factor e_{-k}(z) as a function of k
  GridField phase(N, tau.R());
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) phase(ix, iy) = e_k(-phase.point(ix, iy), z);

  double prev_update = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    for (size_t i = 0; i < rhs.data().size(); ++i)
      rhs.data()[i] =
          cplx(0, -1) * tau.data()[i] * phase.data()[i] * std::conj(sol.m.data()[i]);
    GridField next = cauchy_C(rhs, opt.transform);
    for (auto& v : next.data()) v += 1.0;
    GridField diff = next;
    diff -= sol.m;
    const double upd = diff.norm_l2() / std::max(sol.m.norm_l2(), 1e-300);
    sol.m = std::move(next);
    sol.iterations = it + 1;
    sol.update_norm = upd;
    if (upd < opt.tol) return sol;
    if (upd > prev_update) {
      if (++growth_streak >= 5)
        throw convergence_error(
            "solve_dbar_k: Picard iteration diverging (spectral radius estimate " +
            std::to_string(upd / prev_update) + ")");
    } else {
      growth_streak = 0;
    }
    prev_update = upd;
  }
  return sol;
}

// The Picard ansatz m = 1 + C[...] normalizes m at k = infinity, but the
// true amplitude u1 e^{-ikz} only satisfies m(z, 0) = 1 (its large-k limit
// is a z-dependent real factor).  The conjugate-linear equation's real
// solution space is spanned by the +-W Picard solutions, so the anchored
// amplitudes are real recombinations fixed by the k = 0 condition:
//   m_mu  = a m_+ + i b m_-,   a m_+(0) + i b m_-(0) = 1,
//   m_-mu = c m_- + i d m_+,   c m_-(0) + i d m_+(0) = 1.
struct AnchoredPair {
  GridField m_mu, m_minus_mu;
};

inline AnchoredPair anchor_dbar_pair(const GridField& m_plus, const GridField& m_minus) {
  m_plus.check_same(m_minus);
  const int N = m_plus.N();
  const cplx p0 = m_plus(N / 2, N / 2), q0 = m_minus(N / 2, N / 2);
  // a p + i b q = 1:  Re: a Re p - b Im q = 1;  Im: a Im p + b Re q = 0
  auto solve_anchor = [](cplx p, cplx q) -> std::pair<double, double> {
    const double det = p.real() * q.real() + p.imag() * q.imag();
    if (std::abs(det) < 1e-14)
      throw convergence_error("anchor_dbar_pair: degenerate k=0 anchor");
    return {q.real() / det, -p.imag() / det};
  };
  const auto [a, b] = solve_anchor(p0, q0);
  const auto [c, d] = solve_anchor(q0, p0);
  AnchoredPair out{GridField(N, m_plus.R()), GridField(N, m_plus.R())};
  for (size_t i = 0; i < m_plus.data().size(); ++i) {
    out.m_mu.data()[i] = a * m_plus.data()[i] + cplx(0, b) * m_minus.data()[i];
    out.m_minus_mu.data()[i] = c * m_minus.data()[i] + cplx(0, d) * m_plus.data()[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient recovery from CGO fields on a z-grid.
//
// conjugate_linear = true recovers mu of  dbar f = mu conj(df)  (the CGO
// family); false recovers the linear-Beltrami ratio dbar f / df.  Writing
// f = e^{ikz} M the conjugate-linear ratio becomes
//   mu = e_k(z) dbar M / conj(i k M + dM),
// evaluated with centered differences and masked where the denominator is
// below threshold_frac * max |denominator|.

struct MuRecovery {
  GridField mu;
  double masked_fraction = 0.0;  // probes under the threshold inside |z|<1
};

inline MuRecovery recover_mu(const std::vector<std::pair<cplx, GridField>>& fields,
                             bool conjugate_linear = true, double threshold_frac = 1e-6) {
  if (fields.empty()) throw domain_error("recover_mu: no fields given");
  const int N = fields.front().second.N();
  const double R = fields.front().second.R();
  const double h = fields.front().second.spacing();

  std::vector<GridField> per_k;
  std::vector<GridField> denom_ok;
  for (const auto& [k, f] : fields) {
    if (f.N() != N || f.R() != R) throw domain_error("recover_mu: grid mismatch");
    GridField M(N, R);
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix)
        M(ix, iy) = f(ix, iy) * std::exp(cplx(0, -1) * k * M.point(ix, iy));
    GridField mu_k(N, R), ok(N, R);
    double dmax = 0.0;
    std::vector<cplx> dbarM(size_t(N) * N), den(size_t(N) * N);
    for (int iy = 1; iy + 1 < N; ++iy)
      for (int ix = 1; ix + 1 < N; ++ix) {
        const cplx dx = (M(ix + 1, iy) - M(ix - 1, iy)) / (2 * h);
        const cplx dy = (M(ix, iy + 1) - M(ix, iy - 1)) / (2 * h);
        const cplx db = 0.5 * (dx + cplx(0, 1) * dy);
        const cplx dz = 0.5 * (dx - cplx(0, 1) * dy);
        const size_t idx = size_t(iy) * N + ix;
        dbarM[idx] = db;
        den[idx] = conjugate_linear ? std::conj(cplx(0, 1) * k * M(ix, iy) + dz)
                                    : (cplx(0, 1) * k * M(ix, iy) + dz);
        dmax = std::max(dmax, std::abs(den[idx]));
      }
    for (int iy = 1; iy + 1 < N; ++iy)
      for (int ix = 1; ix + 1 < N; ++ix) {
        const size_t idx = size_t(iy) * N + ix;
        if (std::abs(den[idx]) > threshold_frac * dmax) {
          const cplx ratio = dbarM[idx] / den[idx];
          mu_k(ix, iy) = conjugate_linear ? e_k(k, mu_k.point(ix, iy)) * ratio : ratio;
          ok(ix, iy) = 1.0;
        }
      }
    per_k.push_back(std::move(mu_k));
    denom_ok.push_back(std::move(ok));
  }

  MuRecovery out{GridField(N, R), 0.0};
  size_t masked = 0, inside = 0;
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) {
      std::vector<double> re, im;
      for (size_t j = 0; j < per_k.size(); ++j)
        if (denom_ok[j](ix, iy) != cplx(0, 0)) {
          re.push_back(per_k[j](ix, iy).real());
          im.push_back(per_k[j](ix, iy).imag());
        }
      const bool in_target = std::abs(out.mu.point(ix, iy)) < 1.0;
      if (in_target) inside++;
      if (re.empty()) {
        if (in_target) masked++;
        continue;
      }
      auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
      };
      out.mu(ix, iy) = cplx(median(re), median(im));
    }
  out.masked_fraction = inside ? double(masked) / double(inside) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Ideal-data scattering on a k-grid for an isotropic phantom.  For radial
// phantoms the rotational identity t(r e^{-i a}) = e^{i a} t(r) reduces the
// CGO work to one ray; the identity itself is verified on request.

namespace detail {

inline cplx catmull_rom(const std::vector<double>& x, const std::vector<cplx>& y, double t) {
  const size_t n = x.size();
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  size_t i = std::upper_bound(x.begin(), x.end(), t) - x.begin() - 1;
  i = std::min(i, n - 2);
  const double h = x[i + 1] - x[i];
  const double s = (t - x[i]) / h;
  const cplx p0 = i > 0 ? y[i - 1] : 2.0 * y[0] - y[1];
  const cplx p1 = y[i], p2 = y[i + 1];
  const cplx p3 = i + 2 < n ? y[i + 2] : 2.0 * y[n - 1] - y[n - 2];
  const cplx m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p1 + (s3 - 2 * s2 + s) * m1 + (-2 * s3 + 3 * s2) * p2 +
         (s3 - s2) * m2;
}

}  // namespace detail

struct TauRayOptions {
  // tau peaks at moderate |k| and decays in small lobes; sample the peak
  // region densely and the tail coarsely
  double fine_step = 0.25;
  double coarse_step = 0.5;
  double fine_limit = 4.0;
};

// tau carries the *equation-normalized* scattering field: the coefficient
// entering solve_dbar_k as dbar_k u = -i tau conj(u).  For the contour data
// t_{+-} = (i/2pi) contour(M dz), tau_raw = (t_+ - t_-)/2, the k-plane
// equation satisfied by the assembled u1 is dbar_k u = i conj(tau_raw)
// conj(u) (checked against k-differentiated CGO data), so tau = -conj(tau_raw).
// The raw ray values are kept alongside; the two conventions differ by the
// conjugation ambiguity of the defining displays.
struct TauGridResult {
  GridField tau;                      // equation-normalized, on the 2 K_max box
  std::vector<double> ray_radii;      // radial sample points (radial fast path)
  std::vector<cplx> ray_tau;          // raw tau = (t_+ - t_-)/2 on the positive ray
  double symmetry_defect = 0.0;       // verification of the rotational identity
};

inline TauGridResult scattering_tau_grid(const GridField& mu, const KPlaneOptions& kopt,
                                         TauRayOptions ray = {}, CgoOptions copt = {},
                                         bool verify_symmetry = true) {
  TauGridResult out;
  out.tau = GridField(kopt.grid_N, kopt.K_max);
  // radial ray samples (tau(0) = 0 anchors the interpolation)
  out.ray_radii.push_back(0.0);
  out.ray_tau.push_back(cplx(0, 0));
  std::vector<double> radii;
  for (double r = ray.fine_step; r <= std::min(ray.fine_limit, kopt.K_max) + 1e-12;
       r += ray.fine_step)
    radii.push_back(r);
  for (double r = radii.back() + ray.coarse_step; r <= kopt.K_max + 1e-12;
       r += ray.coarse_step)
    radii.push_back(r);
  std::vector<cplx> vals(radii.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (size_t j = 0; j < radii.size(); ++j)
    vals[j] = scattering_at(mu, cplx(radii[j], 0.0), copt).tau;
  for (size_t j = 0; j < radii.size(); ++j) {
    out.ray_radii.push_back(radii[j]);
    out.ray_tau.push_back(vals[j]);
  }
  if (verify_symmetry) {
    const double r0 = radii[radii.size() / 2];
    const cplx k_off = std::polar(r0, 1.1);
    const cplx direct = scattering_at(mu, k_off, copt).tau;
    const cplx predicted = std::conj(k_off) / r0 * vals[radii.size() / 2];
    out.symmetry_defect =
        std::abs(direct - predicted) / std::max(1e-12, std::abs(direct));
    if (out.symmetry_defect > 0.05)
      throw domain_error(
          "scattering_tau_grid: phantom is not radial (rotational identity fails); "
          "sample the full k-grid instead");
  }
  for (int iy = 0; iy < kopt.grid_N; ++iy)
    for (int ix = 0; ix < kopt.grid_N; ++ix) {
      const cplx k = out.tau.point(ix, iy);
      const double r = std::abs(k);
      if (r > kopt.K_max || r == 0.0) continue;
      // raw tau(k) = (conj(k)/r) tau_ray(r); equation-normalized -conj(.)
      out.tau(ix, iy) =
          -(k / r) * std::conj(detail::catmull_rom(out.ray_radii, out.ray_tau, r));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Full round trip for an isotropic radial phantom:
// sigma -> mu -> CGO -> tau (truncated) -> dbar_k per z-probe -> f_rec ->
// mu_rec -> sigma_rec, with error metrics against the ground truth.

struct ReconstructionOptions {
  KPlaneOptions kplane;
  int z_grid_N = 128;
  double z_R = 2.0;
  int cgo_N = 256;
  double cgo_R = 4.0;
  TauRayOptions tau_ray;
  std::vector<cplx> recovery_k = {cplx(1.0, 0), cplx(1.5, 0), cplx(0, 1.5), cplx(2.0, 0)};
  CgoOptions cgo;
};

struct ReconstructionReport {
  GridField sigma_rec;
  double rel_l2_error = 0.0;  // over |z| < 2 against the ground truth
  double K_max = 0.0;
  int z_grid_N = 0;
  double seconds_scattering = 0.0;
  double seconds_dbar = 0.0;
  double tau_symmetry_defect = 0.0;
};

inline ReconstructionReport reconstruct_sigma(const std::function<double(cplx)>& sigma_true,
                                              ReconstructionOptions opt = {}) {
  using clock = std::chrono::steady_clock;
  const auto mu = GridField::sample(opt.cgo_N, opt.cgo_R, [&](cplx z) {
    const double s = sigma_true(z);
    if (!(s > 0.0)) throw domain_error("reconstruct_sigma: phantom must be positive");
    return (1.0 - s) / (1.0 + s);
  });

  ReconstructionReport rep;
  rep.K_max = opt.kplane.K_max;
  rep.z_grid_N = opt.z_grid_N;

  // stage 1: scattering
  auto t0 = clock::now();
  TauGridResult tau;
  try {
    tau = scattering_tau_grid(mu, opt.kplane, opt.tau_ray, opt.cgo);
  } catch (const std::exception& e) {
    throw convergence_error(std::string("[stage: scattering] ") + e.what());
  }
  rep.tau_symmetry_defect = tau.symmetry_defect;
  rep.seconds_scattering = std::chrono::duration<double>(clock::now() - t0).count();

  // stage 2: dbar solves per z-probe, keeping m(z, k*) at the recovery k's
  t0 = clock::now();
  const int NZ = opt.z_grid_N;
  GridField probe(NZ, opt.z_R);
  std::vector<GridField> u1_fields, u2_fields;
  for (size_t j = 0; j < opt.recovery_k.size(); ++j) {
    u1_fields.emplace_back(NZ, opt.z_R);
    u2_fields.emplace_back(NZ, opt.z_R);
  }
  GridField tau_neg = tau.tau;
  tau_neg *= -1.0;
  std::exception_ptr stage_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (int iy = 0; iy < NZ; ++iy) {
    if (stage_error) continue;
    try {
      GridField warm_p, warm_m;
      for (int ix = 0; ix < NZ; ++ix) {
        const cplx z = probe.point(ix, iy);
        const auto mp = solve_dbar_k(tau.tau, z, opt.kplane, ix ? &warm_p : nullptr);
        const auto mm = solve_dbar_k(tau_neg, z, opt.kplane, ix ? &warm_m : nullptr);
        warm_p = mp.m;
        warm_m = mm.m;
        const auto anchored = anchor_dbar_pair(mp.m, mm.m);
        for (size_t j = 0; j < opt.recovery_k.size(); ++j) {
          const cplx k = opt.recovery_k[j];
          const cplx grow = std::exp(cplx(0, 1) * k * z);
          // u1_mu = e^{ikz} m_mu;  u2_mu = i u1_{-mu} = i e^{ikz} m_{-mu}
          u1_fields[j](ix, iy) = grow * anchored.m_mu.interpolate(k);
          u2_fields[j](ix, iy) = cplx(0, 1) * grow * anchored.m_minus_mu.interpolate(k);
        }
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      stage_error = std::current_exception();
    }
  }
  if (stage_error) {
    try {
      std::rethrow_exception(stage_error);
    } catch (const std::exception& e) {
      throw convergence_error(std::string("[stage: dbar] ") + e.what());
    }
  }
  rep.seconds_dbar = std::chrono::duration<double>(clock::now() - t0).count();

  // stage 3: f_rec, mu_rec, sigma_rec
  std::vector<std::pair<cplx, GridField>> f_plus_fields;
  for (size_t j = 0; j < opt.recovery_k.size(); ++j) {
    GridField fp(NZ, opt.z_R);
    for (int iy = 0; iy < NZ; ++iy)
      for (int ix = 0; ix < NZ; ++ix)
        fp(ix, iy) = cgo_pair_from_u12(u1_fields[j](ix, iy), u2_fields[j](ix, iy)).first;
    f_plus_fields.emplace_back(opt.recovery_k[j], std::move(fp));
  }
  const auto rec = recover_mu(f_plus_fields);

  rep.sigma_rec = GridField(NZ, opt.z_R);
  double num = 0.0, den = 0.0;
  for (int iy = 0; iy < NZ; ++iy)
    for (int ix = 0; ix < NZ; ++ix) {
      const double m = std::max(-0.95, std::min(0.95, rec.mu(ix, iy).real()));
      const double s = (1.0 - m) / (1.0 + m);
      rep.sigma_rec(ix, iy) = s;
      const cplx z = rep.sigma_rec.point(ix, iy);
      if (std::abs(z) < 2.0) {
        const double st = sigma_true(z);
        num += (s - st) * (s - st);
        den += st * st;
      }
    }
  rep.rel_l2_error = std::sqrt(num / den);
  return rep;
}

// ---------------------------------------------------------------------------
// Isothermal flattening: the principal solution of the mu-hat equation turns
// an anisotropic sigma into an isotropic one; F_* sigma is evaluated through
// damped Newton inversion of the grid phase.

struct FlattenResult {
  PlaneMap F;
  ConductivityField sigma_iso;
  double max_offdiag = 0.0;       // sup |(F_* sigma)^{12}| over the sample set
  double max_det_transfer = 0.0;  // sup |det(F_* sigma)(y) - det sigma(F^-1 y)|
};

inline FlattenResult isothermal_flatten(const ConductivityField& sigma, int N = 256,
                                        double R = 4.0, int truncation_n = 64) {
  // The flattening map solves dbar F = -mu_hat dF: the coefficient mu_hat of
  // isothermal_mu_hat belongs to the inverse map (check on diag(l1,l2): the
  // linear map z + m conj(z) equalizes the pushed-forward eigenvalues exactly
  // for m = -mu_hat).
  auto mu_flat = GridField::sample(N, R, [&](cplx z) -> cplx {
    if (std::abs(z) > sigma.support_radius()) return 0.0;
    return -isothermal_mu_hat(sigma.at(z));
  });
  auto [mu_n, ignored] = truncate_mu(mu_flat, GridField(N, R), truncation_n);
  const auto prin = principal_solution(mu_n);

  auto phi_minus_z = std::make_shared<GridField>(prin.phi_minus_z);
  auto g = std::make_shared<GridField>(prin.dbar_phi);
  auto Sg = std::make_shared<GridField>(beurling_S(prin.dbar_phi));

  auto jac = [g, Sg](cplx z) -> Mat2 {
    const cplx dz = 1.0 + Sg->interpolate(z);   // d Phi
    const cplx db = g->interpolate(z);          // dbar Phi
    // w = Phi: w_x = d + dbar, w_y = i (d - dbar)
    const cplx wx = dz + db, wy = cplx(0, 1) * (dz - db);
    return Mat2{wx.real(), wy.real(), wx.imag(), wy.imag()};
  };
  auto fwd = [phi_minus_z](cplx z) { return z + phi_minus_z->interpolate(z); };
  auto inv = [phi_minus_z, jac](cplx y) {
    cplx x = y;  // Phi = z + O(1/z): y itself is a good start
    for (int it = 0; it < 60; ++it) {
      const cplx r = x + phi_minus_z->interpolate(x) - y;
      if (std::abs(r) < 1e-12) return x;
      const Mat2 J = jac(x);
      const Mat2 Ji = J.inverse();
      cplx step(Ji.a11 * r.real() + Ji.a12 * r.imag(), Ji.a21 * r.real() + Ji.a22 * r.imag());
      double damp = 1.0;
      while (damp > 1e-4) {
        const cplx xn = x - damp * step;
        if (std::abs(xn + phi_minus_z->interpolate(xn) - y) < std::abs(r)) {
          x = xn;
          break;
        }
        damp *= 0.5;
      }
      if (damp <= 1e-4) break;
    }
    if (std::abs(x + phi_minus_z->interpolate(x) - y) > 1e-8)
      throw convergence_error("isothermal_flatten: Newton inversion stalled");
    return x;
  };
  PlaneMap F(fwd, inv, jac, false);

  ConductivityField iso = pushforward(sigma, F, sigma.support_radius() + 1.0);

  FlattenResult out{F, iso, 0.0, 0.0};
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx y = std::polar(1.8 * std::sqrt(U(rng)), 2.0 * pi * U(rng));
    try {
      const Sym2 s = iso.at(y);
      const double scale = std::max(1.0, std::abs(s.trace()) / 2);
      out.max_offdiag = std::max(out.max_offdiag, std::abs(s.a12) / scale);
      const double dt = std::abs(s.det() - sigma.at(F.inverse(y)).det());
      out.max_det_transfer = std::max(out.max_det_transfer, dt);
    } catch (const domain_error&) {
      // skip points outside the evaluable region
    }
  }
  return out;
}

}  // namespace calderon
