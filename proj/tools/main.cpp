// Command-line workbench: build conductivities, run forward solves and DN
// comparisons, CGO / scattering / reconstruction jobs, and emit CSV/SVG/JSON
// artifacts.  Exit codes: 0 ok, 2 validation, 3 convergence, 4 I/O.

#include <CLI11.hpp>
#include <iostream>

#include "calderon/dbar.hpp"
#include "calderon/diagnostics.hpp"
#include "calderon/fem.hpp"
#include "calderon/io.hpp"
#include "calderon/orlicz.hpp"
#include "calderon/streamlines.hpp"
#include "calderon/svg.hpp"
#include "calderon/version.hpp"

using namespace calderon;

namespace {

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw domain_error(std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

DirichletData parse_boundary(const std::string& spec, double amp) {
  if (spec.rfind("cos", 0) == 0) return DirichletData::cosine(std::stoi(spec.substr(3)), amp);
  if (spec.rfind("sin", 0) == 0) return DirichletData::sine(std::stoi(spec.substr(3)), amp);
  if (spec == "const") return DirichletData::cosine(0, amp);
  throw domain_error("boundary data must be cosN, sinN or const, got: " + spec);
}

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

cplx parse_cplx(const std::string& s) {
  const size_t comma = s.find(',');
  if (comma == std::string::npos) return cplx(std::stod(s), 0.0);
  return cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory " + dir);
}

void write_manifest(const std::string& dir, const std::string& command, json params,
                    uint64_t seed) {
  json m{{"command", command},
         {"parameters", std::move(params)},
         {"versions", {{"calderon", CALDERON_VERSION}}},
         {"seed", seed}};
  write_file_atomic(dir + "/manifest.json", m.dump(2) + "\n");
}

GridField sample_mu_from_sigma(const ConductivityField& sigma, int N, double R) {
  return GridField::sample(N, R, [&](cplx z) -> cplx {
    const SpectralReport sp = spectral(sigma, z);
    if (sp.degenerate || sp.k_sigma > 1.0 + 1e-9)
      throw domain_error("cgo/scatter/dbar need a bounded isotropic conductivity");
    const double s = 0.5 * sp.trace;
    return (1.0 - s) / (1.0 + s);
  });
}

std::function<double(double)> hole_radius_for(const ConductivityField& sigma) {
  if (sigma.provenance() == Provenance::cloak)
    return [](double r) { return 1.0 + 0.5 * r; };  // core F0(B(r))
  return [](double r) { return r; };
}

// ---------------------------------------------------------------------------

int cmd_build(const std::string& spec_path, const std::string& out, int grid_n, double grid_r) {
  ensure_dir(out);
  const json spec = load_json(spec_path);
  const auto sigma = conductivity_from_json(spec);

  SigmaGrid g;
  g.N = grid_n;
  g.R = grid_r;
  const double h = 2.0 * g.R / g.N;
  for (int iy = 0; iy < g.N; ++iy)
    for (int ix = 0; ix < g.N; ++ix) {
      const cplx z(-g.R + ix * h, -g.R + iy * h);
      SigmaSample s;
      try {
        s = sigma.sample(z);
      } catch (const domain_error&) {
        s = SigmaSample{Sym2::identity()};
      }
      g.s11.push_back(s.m.a11);
      g.s12.push_back(s.m.a12);
      g.s22.push_back(s.m.a22);
    }
  write_sigma_grid(out + "/sigma", g);

  // spectral diagnostics along the positive radial ray
  std::vector<std::vector<double>> rows;
  for (double r = 0.05; r < 2.0; r += 0.05) {
    const auto sp = spectral(sigma, cplx(r, 0.0));
    rows.push_back({r, sp.trace, sp.det, sp.k_sigma, sp.K});
  }
  write_file_atomic(out + "/spectral.csv", to_csv({"r", "trace", "det", "k_sigma", "K"}, rows));

  const auto rep = integrability_check(sigma, IntegrabilityClass::exp_p, {1.0, {}});
  std::vector<std::vector<double>> ladder;
  for (size_t i = 0; i < rep.integral_ladder.size(); ++i)
    ladder.push_back({double(i), rep.integral_ladder[i], rep.log_integral_ladder[i]});
  write_file_atomic(out + "/integrability.csv",
                    to_csv({"level", "integral", "log_integral"}, ladder));
  json diag{{"exp_p_verdict", to_string(rep.verdict)},
            {"nodes", rep.nodes},
            {"skipped", rep.skipped}};
  write_file_atomic(out + "/diagnostics.json", diag.dump(2) + "\n");

  // Luxemburg/Orlicz norms of the sampled trace over the grid box
  SampledField tr;
  const double cell = h * h;
  for (size_t i = 0; i < g.s11.size(); ++i) {
    tr.values.push_back(g.s11[i] + g.s22[i]);
    tr.areas.push_back(cell);
  }
  const OrliczSpec spec20{2, 0.0}, spec21{2, 1.0};
  write_file_atomic(out + "/norms.csv",
                    norm_report_csv({{"trace_luxemburg_M20", luxemburg_norm(tr, spec20), 1e-8},
                                     {"trace_luxemburg_M21", luxemburg_norm(tr, spec21), 1e-8},
                                     {"trace_orlicz_M20", orlicz_norm(tr, spec20), 1e-8}}));
  return 0;
}

int cmd_solve(const std::string& sigma_path, const std::string& hspec, double amp,
              const std::string& out, int n_theta, double h_base, int sample_n) {
  ensure_dir(out);
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto h = parse_boundary(hspec, amp);
  auto mesh = make_domain_mesh(sigma, 0.0, {n_theta, h_base});
  const auto sol = solve_dirichlet(sigma, h, mesh);

  GridField u(sample_n, 2.0);
  for (int iy = 0; iy < sample_n; ++iy)
    for (int ix = 0; ix < sample_n; ++ix) {
      const cplx z = u.point(ix, iy);
      const int t = mesh->locate(z);
      if (t < 0) continue;
      const auto& tri = mesh->triangles[t];
      const cplx a = mesh->vertices[tri[0]], bb = mesh->vertices[tri[1]],
                 c = mesh->vertices[tri[2]];
      const double d = ((bb - a).real() * (c - a).imag() - (bb - a).imag() * (c - a).real());
      const double l1 = ((z - a).real() * (c - a).imag() - (z - a).imag() * (c - a).real()) / d;
      const double l2 = ((bb - a).real() * (z - a).imag() - (bb - a).imag() * (z - a).real()) / d;
      u(ix, iy) = (1 - l1 - l2) * sol.u[tri[0]] + l1 * sol.u[tri[1]] + l2 * sol.u[tri[2]];
    }
  write_grid_field(out + "/solution", u);
  std::ostringstream mesh_txt;
  write_mesh(mesh_txt, *mesh);
  write_file_atomic(out + "/mesh.txt", mesh_txt.str());
  json rep{{"energy", sol.energy},
           {"vertices", mesh->vertices.size()},
           {"triangles", mesh->triangles.size()}};
  write_file_atomic(out + "/solve.json", rep.dump(2) + "\n");
  return 0;
}

int cmd_dn(const std::string& sigma_path, const std::string& hspec, double amp,
           const std::string& ladder_str, const std::string& out, int n_theta, double h_base,
           double h_min, int matrix_order) {
  ensure_dir(out);
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto h = parse_boundary(hspec, amp);
  if (matrix_order > 0) {
    // DN matrix on the Fourier basis requires a bounded field on the full disc
    FemSolver solver(make_domain_mesh(sigma, 0.0, {n_theta, h_base, h_min}), sigma);
    const Eigen::MatrixXd B = solver.dn_matrix(matrix_order);
    std::vector<std::vector<double>> mrows;
    for (int i = 0; i < B.rows(); ++i) {
      std::vector<double> row;
      for (int j = 0; j < B.cols(); ++j) row.push_back(B(i, j));
      mrows.push_back(std::move(row));
    }
    std::vector<std::string> header;
    header.push_back("const");
    for (int n = 1; n <= matrix_order; ++n) {
      header.push_back("cos" + std::to_string(n));
      header.push_back("sin" + std::to_string(n));
    }
    write_file_atomic(out + "/dn_matrix.csv", to_csv(header, mrows));
  }
  const auto res = regularized_dn_form(sigma, h, parse_ladder(ladder_str),
                                       {n_theta, h_base, h_min}, {}, hole_radius_for(sigma));
  std::vector<std::vector<double>> rows;
  for (const auto& pt : res.ladder) rows.push_back({pt.r, pt.hole_radius, pt.Q});
  write_file_atomic(out + "/dn_ladder.csv", to_csv({"r", "hole_radius", "Q"}, rows));
  json rep{{"extrapolated", res.extrapolated}, {"model", res.model}};
  write_file_atomic(out + "/dn.json", rep.dump(2) + "\n");
  return 0;
}

int cmd_compare_dn(const std::string& a_path, const std::string& b_path,
                   const std::string& hspecs, double tol, const std::string& ladder_str,
                   const std::string& out, int n_theta, double h_base, double h_min) {
  ensure_dir(out);
  const auto sigma_a = conductivity_from_json(load_json(a_path));
  const auto sigma_b = conductivity_from_json(load_json(b_path));
  const auto ladder = parse_ladder(ladder_str);
  std::vector<std::vector<double>> rows;
  bool all_match = true;
  std::string verdicts;
  size_t pos = 0;
  while (pos < hspecs.size()) {
    size_t next = hspecs.find(',', pos);
    if (next == std::string::npos) next = hspecs.size();
    const std::string hspec = hspecs.substr(pos, next - pos);
    pos = next + 1;
    const auto h = parse_boundary(hspec, 1.0);
    auto run = [&](const ConductivityField& s) {
      return regularized_dn_form(s, h, ladder, {n_theta, h_base, h_min}, {},
                                 hole_radius_for(s))
          .extrapolated;
    };
    const double Qa = run(sigma_a), Qb = run(sigma_b);
    const bool match = std::abs(Qa - Qb) <= tol * std::max(std::abs(Qa), std::abs(Qb));
    all_match = all_match && match;
    rows.push_back({double(rows.size()), Qa, Qb, std::abs(Qa - Qb), match ? 1.0 : 0.0});
    verdicts += hspec + (match ? ": match\n" : ": mismatch\n");
  }
  write_file_atomic(out + "/compare.csv",
                    to_csv({"index", "Q_a", "Q_b", "diff", "match"}, rows));
  write_file_atomic(out + "/verdict.txt",
                    verdicts + (all_match ? "overall: match\n" : "overall: mismatch\n"));
  std::cout << (all_match ? "match" : "mismatch") << "\n";
  return 0;
}

int cmd_render(const std::string& sigma_path, const std::string& hspec, double amp,
               const std::string& field_base, const std::string& out, int n_theta,
               double h_base, int n_seeds) {
  ensure_dir(out);
  if (!field_base.empty()) {
    const GridField f = read_grid_field(field_base);
    write_file_atomic(out + "/field.svg", render_grid_svg(f));
    return 0;
  }
  if (sigma_path.empty()) throw domain_error("render needs --sigma or --field");
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto h = parse_boundary(hspec, amp);
  auto mesh = make_domain_mesh(sigma, 0.0, {n_theta, h_base});
  const auto sol = solve_dirichlet(sigma, h, mesh);
  std::vector<cplx> seeds;
  for (int i = 0; i < n_seeds; ++i)
    seeds.push_back(cplx(-1.5, -1.1 + 2.2 * (i + 0.5) / n_seeds));
  const auto lines = current_lines(sol, sigma, seeds, {0.02, 1000});
  write_file_atomic(out + "/solution.svg", render_solution_svg(sol, lines));
  return 0;
}

int cmd_cgo(const std::string& sigma_path, const std::string& k_str,
            const std::string& lambda_str, const std::string& out, int N, double R) {
  ensure_dir(out);
  const cplx k = parse_cplx(k_str), lambda = parse_cplx(lambda_str);
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto mu = sample_mu_from_sigma(sigma, N, R);
  GridField zero(N, R);
  const auto sol = cgo_solve(zero, mu, k, lambda);
  write_grid_field(out + "/f", sol.f);
  GridField phi(N, R);
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) phi(ix, iy) = phi.point(ix, iy) + sol.phi_minus_z(ix, iy);
  write_grid_field(out + "/phi", phi);
  json diag{{"outer_iterations", sol.outer_iterations},
            {"residual", sol.residual},
            {"residual_history", sol.residual_history},
            {"inner_term_norms", sol.inner_term_norms}};
  write_file_atomic(out + "/cgo.json", diag.dump(2) + "\n");
  return 0;
}

int cmd_scatter(const std::string& sigma_path, double kmax, int kgrid, const std::string& out,
                int N, double R) {
  ensure_dir(out);
  if (kmax <= 0) throw domain_error("--kmax must be positive");
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto mu = sample_mu_from_sigma(sigma, N, R);
  const KPlaneOptions kopt{kmax, kgrid};
  const auto tau = scattering_tau_grid(mu, kopt);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < tau.ray_radii.size(); ++i)
    rows.push_back({tau.ray_radii[i], 0.0, tau.ray_tau[i].real(), tau.ray_tau[i].imag()});
  write_file_atomic(out + "/tau.csv", to_csv({"Re k", "Im k", "Re tau", "Im tau"}, rows));
  write_grid_field(out + "/tau_grid", tau.tau);
  json diag{{"symmetry_defect", tau.symmetry_defect}, {"K_max", kmax}};
  write_file_atomic(out + "/scatter.json", diag.dump(2) + "\n");
  return 0;
}

int cmd_dbar(const std::string& sigma_path, double kmax, int kgrid, int zgrid, int cgo_n,
             const std::string& out) {
  ensure_dir(out);
  if (kmax <= 0) throw domain_error("--kmax must be positive");
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  ReconstructionOptions opt;
  opt.kplane = {kmax, kgrid};
  opt.z_grid_N = zgrid;
  opt.cgo_N = cgo_n;
  const auto rep = reconstruct_sigma(
      [&](cplx z) {
        const auto sp = spectral(sigma, z);
        if (sp.degenerate || sp.k_sigma > 1.0 + 1e-9)
          throw domain_error("dbar needs a bounded isotropic phantom");
        return 0.5 * sp.trace;
      },
      opt);
  write_grid_field(out + "/sigma_rec", rep.sigma_rec);
  json report{{"rel_l2_error", rep.rel_l2_error},
              {"K_max", rep.K_max},
              {"z_grid_N", rep.z_grid_N},
              {"tau_symmetry_defect", rep.tau_symmetry_defect}};
  write_file_atomic(out + "/report.json", report.dump(2) + "\n");
  std::cerr << "scattering " << rep.seconds_scattering << " s, dbar " << rep.seconds_dbar
            << " s\n";
  return 0;
}

int cmd_flatten(const std::string& sigma_path, const std::string& out, int N, double R) {
  ensure_dir(out);
  const auto sigma = conductivity_from_json(load_json(sigma_path));
  const auto res = isothermal_flatten(sigma, N, R);
  json rep{{"max_offdiag", res.max_offdiag}, {"max_det_transfer", res.max_det_transfer}};
  write_file_atomic(out + "/flatten.json", rep.dump(2) + "\n");
  GridField F(N, R);
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) F(ix, iy) = res.F.eval(F.point(ix, iy));
  write_grid_field(out + "/map", F);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical workbench for degenerate planar conductivities"};
  app.require_subcommand(1);

  std::string spec, sigma_a, sigma_b, hspec = "cos1", ladder = "0.5,0.25,0.125,0.0625";
  std::string out = ".", field_base, k_str = "1,0", lambda_str = "1,0", hlist = "cos1";
  double amp = 1.0, tol = 0.02, kmax = 8.0, grid_r = 2.0, h_base = 0.04, h_min = 1e-3, R = 4.0;
  int grid_n = 256, n_theta = 256, sample_n = 256, n_seeds = 16, N = 256, kgrid = 128,
      zgrid = 128, cgo_n = 256;
  uint64_t seed = 0;

  auto* b = app.add_subcommand("build", "build a conductivity and its diagnostics");
  b->add_option("--spec", spec)->required();
  b->add_option("--out", out);
  b->add_option("--grid-n", grid_n);
  b->add_option("--grid-r", grid_r);

  auto* s = app.add_subcommand("solve", "forward Dirichlet solve");
  s->add_option("--sigma", spec)->required();
  s->add_option("--boundary", hspec);
  s->add_option("--amp", amp);
  s->add_option("--out", out);
  s->add_option("--mesh-theta", n_theta);
  s->add_option("--mesh-h", h_base);
  s->add_option("--sample-n", sample_n);

  auto* d = app.add_subcommand("dn", "regularized DN form over an excision ladder");
  d->add_option("--sigma", spec)->required();
  d->add_option("--boundary", hspec);
  d->add_option("--amp", amp);
  d->add_option("--ladder", ladder);
  d->add_option("--out", out);
  d->add_option("--mesh-theta", n_theta);
  d->add_option("--mesh-h", h_base);
  d->add_option("--mesh-hmin", h_min);
  int matrix_order = 0;
  d->add_option("--matrix", matrix_order);

  auto* c = app.add_subcommand("compare-dn", "compare DN forms of two conductivities");
  c->add_option("--sigma-a", sigma_a)->required();
  c->add_option("--sigma-b", sigma_b)->required();
  c->add_option("--boundary", hlist);
  c->add_option("--tol", tol);
  c->add_option("--ladder", ladder);
  c->add_option("--out", out);
  c->add_option("--mesh-theta", n_theta);
  c->add_option("--mesh-h", h_base);
  c->add_option("--mesh-hmin", h_min);

  auto* r = app.add_subcommand("render", "render a solution or grid field to SVG");
  r->add_option("--sigma", spec);
  r->add_option("--boundary", hspec);
  r->add_option("--amp", amp);
  r->add_option("--field", field_base);
  r->add_option("--out", out);
  r->add_option("--mesh-theta", n_theta);
  r->add_option("--mesh-h", h_base);
  r->add_option("--seeds", n_seeds);

  auto* g = app.add_subcommand("cgo", "exponentially growing solution at one k");
  g->add_option("--sigma", spec)->required();
  g->add_option("--k", k_str);
  g->add_option("--lambda", lambda_str);
  g->add_option("--out", out);
  g->add_option("--n", N);
  g->add_option("--r", R);

  auto* sc = app.add_subcommand("scatter", "scattering data on a truncated k-grid");
  sc->add_option("--sigma", spec)->required();
  sc->add_option("--kmax", kmax);
  sc->add_option("--kgrid", kgrid);
  sc->add_option("--out", out);
  sc->add_option("--n", N);
  sc->add_option("--r", R);

  auto* db = app.add_subcommand("dbar", "full reconstruction round trip");
  db->add_option("--sigma", spec)->required();
  db->add_option("--kmax", kmax);
  db->add_option("--kgrid", kgrid);
  db->add_option("--zgrid", zgrid);
  db->add_option("--cgo-n", cgo_n);
  db->add_option("--out", out);

  auto* fl = app.add_subcommand("flatten", "isothermal flattening of an anisotropic field");
  fl->add_option("--sigma", spec)->required();
  fl->add_option("--out", out);
  fl->add_option("--n", N);
  fl->add_option("--r", R);

  for (auto* sub : {b, s, d, c, r, g, sc, db, fl}) sub->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    int rc = 1;
    json params;
    std::string command;
    if (b->parsed()) {
      command = "build";
      params = {{"spec", spec}, {"grid_n", grid_n}, {"grid_r", grid_r}};
      rc = cmd_build(spec, out, grid_n, grid_r);
    } else if (s->parsed()) {
      command = "solve";
      params = {{"sigma", spec},      {"h", hspec},        {"amp", amp},
                {"mesh_theta", n_theta}, {"mesh_h", h_base}, {"sample_n", sample_n}};
      rc = cmd_solve(spec, hspec, amp, out, n_theta, h_base, sample_n);
    } else if (d->parsed()) {
      command = "dn";
      params = {{"sigma", spec},         {"h", hspec},       {"amp", amp},
                {"ladder", ladder},      {"mesh_theta", n_theta}, {"mesh_h", h_base},
                {"mesh_hmin", h_min}};
      rc = cmd_dn(spec, hspec, amp, ladder, out, n_theta, h_base, h_min, matrix_order);
    } else if (c->parsed()) {
      command = "compare-dn";
      params = {{"sigma_a", sigma_a}, {"sigma_b", sigma_b},    {"h", hlist},
                {"tol", tol},         {"ladder", ladder},      {"mesh_theta", n_theta},
                {"mesh_h", h_base},   {"mesh_hmin", h_min}};
      rc = cmd_compare_dn(sigma_a, sigma_b, hlist, tol, ladder, out, n_theta, h_base, h_min);
    } else if (r->parsed()) {
      command = "render";
      params = {{"sigma", spec},          {"h", hspec},       {"amp", amp},
                {"field", field_base},    {"mesh_theta", n_theta}, {"mesh_h", h_base},
                {"seeds", n_seeds}};
      rc = cmd_render(spec, hspec, amp, field_base, out, n_theta, h_base, n_seeds);
    } else if (g->parsed()) {
      command = "cgo";
      params = {{"sigma", spec}, {"k", k_str}, {"lambda", lambda_str}, {"n", N}, {"r", R}};
      rc = cmd_cgo(spec, k_str, lambda_str, out, N, R);
    } else if (sc->parsed()) {
      command = "scatter";
      params = {{"sigma", spec}, {"kmax", kmax}, {"kgrid", kgrid}, {"n", N}, {"r", R}};
      rc = cmd_scatter(spec, kmax, kgrid, out, N, R);
    } else if (db->parsed()) {
      command = "dbar";
      params = {{"sigma", spec},   {"kmax", kmax},   {"kgrid", kgrid},
                {"zgrid", zgrid},  {"cgo_n", cgo_n}};
      rc = cmd_dbar(spec, kmax, kgrid, zgrid, cgo_n, out);
    } else if (fl->parsed()) {
      command = "flatten";
      params = {{"sigma", spec}, {"n", N}, {"r", R}};
      rc = cmd_flatten(spec, out, N, R);
    }
    if (rc == 0) write_manifest(out, command, params, seed);
    return rc;
  } catch (const domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const convergence_error& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
