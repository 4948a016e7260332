#pragma once

// Serialization: JSON specs for weights and conductivities, the flat
// little-endian float64 grid binary with JSON sidecar, CSV reports, and
// atomic file writes (temp + rename).

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "calderon/conductivity.hpp"
#include "calderon/grid.hpp"
#include "calderon/maps.hpp"
#include "calderon/weights.hpp"

namespace calderon {

using json = nlohmann::json;

inline void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + tmp);
    os.write(bytes.data(), std::streamsize(bytes.size()));
    if (!os) throw io_error("short write: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("rename failed: " + path + " (" + ec.message() + ")");
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open: " + path);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Weight specs: {kind, p | eps, table?}.

inline json weight_to_json(const WeightGauge& w) {
  json j;
  switch (w.kind()) {
    case WeightGauge::Kind::affine: j["kind"] = "affine"; j["p"] = w.param(); break;
    case WeightGauge::Kind::almost_linear: j["kind"] = "almost-linear"; break;
    case WeightGauge::Kind::sublinear: j["kind"] = "sublinear"; j["eps"] = w.param(); break;
    case WeightGauge::Kind::log_weight: j["kind"] = "log"; j["p"] = w.param(); break;
    case WeightGauge::Kind::tabulated:
      j["kind"] = "tabulated";
      j["table"] = {{"t", w.table_abscissae()}, {"A", w.table_values()}};
      break;
  }
  return j;
}

inline WeightGauge weight_from_json(const json& j, const std::string& where = "/weight") {
  if (!j.is_object() || !j.contains("kind"))
    throw domain_error("weight spec: missing \"kind\" at " + where);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") return WeightGauge::affine(j.value("p", 1.0));
  if (kind == "almost-linear") return WeightGauge::almost_linear();
  if (kind == "sublinear") return WeightGauge::sublinear(j.value("eps", 0.5));
  if (kind == "log") return WeightGauge::log_weight(j.value("p", 1.0));
  if (kind == "tabulated") {
    if (!j.contains("table"))
      throw domain_error("weight spec: tabulated kind needs \"table\" at " + where + "/table");
    return WeightGauge::tabulated(j.at("table").at("t").get<std::vector<double>>(),
                                  j.at("table").at("A").get<std::vector<double>>());
  }
  throw domain_error("weight spec: unknown kind \"" + kind + "\" at " + where + "/kind");
}

// ---------------------------------------------------------------------------
// Conductivity specs:
//   {"kind":"radial",   "gamma": <number|string|{"profile":...}>}
//   {"kind":"cloak",    "base": number, "eta": [[a,b],[b,c]]}
//   {"kind":"hologram", "weight": <weight spec>}
//   {"kind":"aniso-patch", "anisotropy": K, "inner_radius": r0, "outer_radius": r1}
//   {"kind":"grid",     "file": <path base>}

namespace detail {
inline std::function<double(double)> radial_profile_from_json(const json& g,
                                                              const std::string& where) {
  if (g.is_number()) {
    const double v = g.get<double>();
    return [v](double) { return v; };
  }
  if (g.is_string()) {
    const double v = std::stod(g.get<std::string>());
    return [v](double) { return v; };
  }
  if (g.is_object()) {
    const std::string prof = g.value("profile", "");
    if (prof == "constant") {
      const double v = g.at("value").get<double>();
      return [v](double) { return v; };
    }
    if (prof == "bump") {
      const double amp = g.value("amplitude", 0.5);
      const double rad = g.value("radius", 0.8);
      return [amp, rad](double r) {
        if (r >= rad) return 1.0;
        const double x = r / rad;
        return 1.0 + amp * std::exp(-1.0 / (1.0 - x * x));
      };
    }
    throw domain_error("conductivity spec: unknown radial profile at " + where + "/profile");
  }
  throw domain_error("conductivity spec: bad gamma at " + where);
}
}  // namespace detail

struct SigmaGrid {
  int N = 0;
  double R = 0;
  std::vector<double> s11, s12, s22;
};

inline ConductivityField conductivity_from_json(const json& j, const std::string& where = "");

inline ConductivityField conductivity_from_sigma_grid(std::shared_ptr<const SigmaGrid> g) {
  return ConductivityField(
      [g](cplx z) -> SigmaSample {
        const double h = 2.0 * g->R / g->N;
        double fx = (z.real() + g->R) / h, fy = (z.imag() + g->R) / h;
        fx = std::min(std::max(fx, 0.0), double(g->N - 1) - 1e-12);
        fy = std::min(std::max(fy, 0.0), double(g->N - 1) - 1e-12);
        const int ix = int(fx), iy = int(fy);
        const double tx = fx - ix, ty = fy - iy;
        auto lerp = [&](const std::vector<double>& v) {
          const size_t i00 = size_t(iy) * g->N + ix;
          return (1 - tx) * (1 - ty) * v[i00] + tx * (1 - ty) * v[i00 + 1] +
                 (1 - tx) * ty * v[i00 + g->N] + tx * ty * v[i00 + g->N + 1];
        };
        return SigmaSample{Sym2{lerp(g->s11), lerp(g->s12), lerp(g->s22)}};
      },
      g->R, Provenance::grid_sampled);
}

// ---------------------------------------------------------------------------
// Grid binaries: flat little-endian float64 plus a JSON sidecar naming the
// layout.  <base>.bin + <base>.json.

inline void write_sigma_grid(const std::string& base, const SigmaGrid& g) {
  std::string bytes;
  bytes.reserve(size_t(g.N) * g.N * 3 * 8);
  auto push = [&](double v) { bytes.append(reinterpret_cast<const char*>(&v), 8); };
  for (size_t i = 0; i < g.s11.size(); ++i) {
    push(g.s11[i]);
    push(g.s12[i]);
    push(g.s22[i]);
  }
  write_file_atomic(base + ".bin", bytes);
  json side{{"N", g.N}, {"R", g.R}, {"layout", "s11,s12,s22 interleaved"}};
  write_file_atomic(base + ".json", side.dump(2) + "\n");
}

inline SigmaGrid read_sigma_grid(const std::string& base) {
  const json side = json::parse(read_file(base + ".json"));
  SigmaGrid g;
  g.N = side.at("N").get<int>();
  g.R = side.at("R").get<double>();
  if (side.at("layout") != "s11,s12,s22 interleaved")
    throw io_error("sigma grid sidecar: unexpected layout");
  const std::string bytes = read_file(base + ".bin");
  const size_t n = size_t(g.N) * g.N;
  if (bytes.size() != n * 3 * 8) throw io_error("sigma grid binary: size mismatch");
  g.s11.resize(n);
  g.s12.resize(n);
  g.s22.resize(n);
  const double* p = reinterpret_cast<const double*>(bytes.data());
  for (size_t i = 0; i < n; ++i) {
    g.s11[i] = p[3 * i];
    g.s12[i] = p[3 * i + 1];
    g.s22[i] = p[3 * i + 2];
  }
  return g;
}

inline void write_grid_field(const std::string& base, const GridField& f) {
  std::string bytes;
  bytes.reserve(f.data().size() * 16);
  for (const auto& v : f.data()) {
    const double re = v.real(), im = v.imag();
    bytes.append(reinterpret_cast<const char*>(&re), 8);
    bytes.append(reinterpret_cast<const char*>(&im), 8);
  }
  write_file_atomic(base + ".bin", bytes);
  json side{{"N", f.N()}, {"R", f.R()}, {"layout", "re,im interleaved"}};
  write_file_atomic(base + ".json", side.dump(2) + "\n");
}

inline GridField read_grid_field(const std::string& base) {
  const json side = json::parse(read_file(base + ".json"));
  const int N = side.at("N").get<int>();
  const double R = side.at("R").get<double>();
  if (side.at("layout") != "re,im interleaved")
    throw io_error("grid field sidecar: unexpected layout");
  const std::string bytes = read_file(base + ".bin");
  GridField f(N, R);
  if (bytes.size() != f.data().size() * 16) throw io_error("grid field binary: size mismatch");
  const double* p = reinterpret_cast<const double*>(bytes.data());
  for (size_t i = 0; i < f.data().size(); ++i) f.data()[i] = cplx(p[2 * i], p[2 * i + 1]);
  return f;
}

inline ConductivityField conductivity_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind"))
    throw domain_error("conductivity spec: missing \"kind\" at " + where + "/kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "radial") {
    auto gamma = detail::radial_profile_from_json(j.value("gamma", json(1.0)), where + "/gamma");
    return ConductivityField::isotropic([gamma](cplx z) { return gamma(std::abs(z)); }, 2.0);
  }
  if (kind == "cloak") {
    Sym2 eta = Sym2::identity();
    if (j.contains("eta")) {
      const auto m = j.at("eta");
      eta = Sym2{m.at(0).at(0).get<double>(), m.at(0).at(1).get<double>(),
                 m.at(1).at(1).get<double>()};
    }
    return make_cloak(j.value("base", 1.0), eta);
  }
  if (kind == "hologram") {
    if (!j.contains("weight"))
      throw domain_error("conductivity spec: hologram needs \"weight\" at " + where + "/weight");
    const auto w = weight_from_json(j.at("weight"), where + "/weight");
    try {
      return hologram_conductivity(w);
    } catch (const convergence_error&) {
      throw domain_error("conductivity spec: weight must be sublinear for hologram (at " +
                         where + "/weight)");
    }
  }
  if (kind == "aniso-patch") {
    const double K = j.value("anisotropy", 4.0);
    const double r0 = j.value("inner_radius", 0.5);
    const double r1 = j.value("outer_radius", 0.9);
    if (!(K > 0) || !(r0 > 0) || !(r1 > r0) || r1 >= 2.0)
      throw domain_error("conductivity spec: bad aniso-patch parameters at " + where);
    return ConductivityField(
        [K, r0, r1](cplx z) {
          const double r = std::abs(z);
          double blend = 0.0;
          if (r <= r0) blend = 1.0;
          else if (r < r1) {
            const double t = (r - r0) / (r1 - r0);
            blend = 1.0 - t * t * (3 - 2 * t);
          }
          const double a = blend * 0.5 * std::log(K);
          return SigmaSample{Sym2::diag(std::exp(a), std::exp(-a))};
        },
        2.0, Provenance::analytic_radial);
  }
  if (kind == "grid") {
    if (!j.contains("file"))
      throw domain_error("conductivity spec: grid kind needs \"file\" at " + where + "/file");
    auto g = std::make_shared<SigmaGrid>(read_sigma_grid(j.at("file").get<std::string>()));
    return conductivity_from_sigma_grid(std::move(g));
  }
  throw domain_error("conductivity spec: unknown kind \"" + kind + "\" at " + where + "/kind");
}

// ---------------------------------------------------------------------------
// CSV writers with deterministic formatting.

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i)
    out += header[i] + (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out += format_double(row[i]) + std::string(i + 1 < row.size() ? "," : "\n");
  }
  return out;
}

// norm reports: (name, value, tolerance) rows
struct NormReportEntry {
  std::string name;
  double value;
  double tolerance;
};

inline std::string norm_report_csv(const std::vector<NormReportEntry>& entries) {
  std::string out = "name,value,tolerance\n";
  for (const auto& e : entries)
    out += e.name + "," + format_double(e.value) + "," + format_double(e.tolerance) + "\n";
  return out;
}

}  // namespace calderon
