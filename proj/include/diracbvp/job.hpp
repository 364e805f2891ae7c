#pragma once

// JSON job files and reports. A job is validated completely (unknown keys
// are errors) before any computation or file output happens.
//
// Requires OpenSSL libcrypto for the input hash.

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boundary.hpp"
#include "clifford.hpp"
#include "errors.hpp"
#include "halfline.hpp"
#include "lopatinsky.hpp"
#include "oracle.hpp"
#include "spectrum.hpp"

namespace diracbvp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- parsing

namespace job {

inline void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed,
                       const std::set<std::string>& required = {}) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw SchemaError(path + "/" + k, "unknown key");
  for (const auto& k : required)
    if (!obj.contains(k)) throw SchemaError(path + "/" + k, "missing required key");
}

inline double number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(path + "/" + key, "expected a finite number");
  return x;
}

inline double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj, key, path) : fallback;
}

inline long integer_or(const json& obj, const std::string& key, const std::string& path, long fallback, long lo) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  const long x = v.get<long>();
  if (x < lo) throw SchemaError(path + "/" + key, "must be >= " + std::to_string(lo));
  return x;
}

inline bool boolean_or(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw SchemaError(path + "/" + key, "expected a boolean");
  return obj.at(key).get<bool>();
}

inline std::string string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const std::string& path, std::size_t exact_size = 0) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
  if (exact_size && v.size() != exact_size)
    throw SchemaError(path, "expected " + std::to_string(exact_size) + " entries");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) throw SchemaError(path + "/" + std::to_string(k), "expected a number");
    out.push_back(v[k].get<double>());
  }
  return out;
}

inline Vec3 vec3(const json& v, const std::string& path) {
  const auto x = numbers(v, path, 3);
  return {x[0], x[1], x[2]};
}

/// number or [re, im]
inline cplx complex_entry(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  const auto x = numbers(v, path, 2);
  return {x[0], x[1]};
}

inline CMat2 matrix2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected a 2x2 matrix");
  CMat2 m{};
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    if (!v[i].is_array() || v[i].size() != 2) throw SchemaError(rp, "expected a row of 2 entries");
    for (std::size_t j = 0; j < 2; ++j) m(i, j) = complex_entry(v[i][j], rp + "/" + std::to_string(j));
  }
  return m;
}

inline BoundaryFunction boundary_function(const json& v, const std::string& path) {
  if (v.is_number()) return BoundaryFunction::constant(v.get<double>());
  check_keys(v, path, {"kind", "value", "points", "values"}, {"kind"});
  const std::string kind = string(v, "kind", path);
  if (kind == "const") {
    check_keys(v, path, {"kind", "value"}, {"value"});
    return BoundaryFunction::constant(number(v, "value", path));
  }
  if (kind == "table") {
    check_keys(v, path, {"kind", "points", "values"}, {"points", "values"});
    const auto& pts = v.at("points");
    if (!pts.is_array()) throw SchemaError(path + "/points", "expected an array");
    std::vector<Vec3> p;
    for (std::size_t k = 0; k < pts.size(); ++k) p.push_back(vec3(pts[k], path + "/points/" + std::to_string(k)));
    auto vals = numbers(v.at("values"), path + "/values");
    if (p.empty() || p.size() != vals.size())
      throw SchemaError(path + "/values", "table needs equally many (nonzero) points and values");
    return BoundaryFunction::table(std::move(p), std::move(vals));
  }
  throw SchemaError(path + "/kind", "unknown function kind '" + kind + "' (expected const or table)");
}

inline BoundaryCondition boundary(const json& v, const std::string& path) {
  check_keys(v, path, {"family", "a", "theta", "b1", "b2"}, {"family"});
  const std::string fam = string(v, "family", path);
  if (fam == "mit") {
    check_keys(v, path, {"family", "a"}, {"a"});
    return BoundaryCondition::mit(boundary_function(v.at("a"), path + "/a"));
  }
  if (fam == "behrndt") {
    check_keys(v, path, {"family", "theta"}, {"theta"});
    return BoundaryCondition::behrndt(boundary_function(v.at("theta"), path + "/theta"));
  }
  if (fam == "generic") {
    check_keys(v, path, {"family", "b1", "b2"}, {"b1", "b2"});
    return BoundaryCondition::generic(matrix2(v.at("b1"), path + "/b1"), matrix2(v.at("b2"), path + "/b2"));
  }
  throw SchemaError(path + "/family", "unknown family '" + fam + "' (expected mit, behrndt or generic)");
}

inline std::vector<SurfacePoint> point_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of {position, normal}");
  std::vector<SurfacePoint> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string p = path + "/" + std::to_string(k);
    check_keys(v[k], p, {"position", "normal"}, {"position", "normal"});
    const Vec3 n = vec3(v[k].at("normal"), p + "/normal");
    if (!(norm(n) > 0.0)) throw SchemaError(p + "/normal", "normal must be nonzero");
    out.push_back({static_cast<int>(k), vec3(v[k].at("position"), p + "/position"), BoundaryPointFrame::from_normal(n)});
  }
  return out;
}

struct Domain {
  std::string kind;  // exterior-ball | half-space | cone | points
  SurfaceSampler sampler;
  ojson resolved;
};

inline Domain domain(const json& v, const std::string& path, const std::filesystem::path& base_dir) {
  check_keys(v, path, {"kind", "radius", "n", "extent", "half_angle", "r_min", "r_max", "file", "points"}, {"kind"});
  Domain d;
  d.kind = string(v, "kind", path);
  if (d.kind == "exterior-ball") {
    check_keys(v, path, {"kind", "radius", "n"});
    const double r = number_or(v, "radius", path, 1.0);
    if (!(r > 0.0)) throw SchemaError(path + "/radius", "must be positive");
    const long n = integer_or(v, "n", path, 512, 0);
    d.sampler = SurfaceSampler::sphere(r, static_cast<std::size_t>(n));
    d.resolved = {{"kind", d.kind}, {"radius", r}, {"n", n}};
  } else if (d.kind == "half-space") {
    check_keys(v, path, {"kind", "n", "extent"});
    const long n = integer_or(v, "n", path, 256, 0);
    const double ext = number_or(v, "extent", path, 10.0);
    d.sampler = SurfaceSampler::plane(static_cast<std::size_t>(n), ext);
    d.resolved = {{"kind", d.kind}, {"n", n}, {"extent", ext}};
  } else if (d.kind == "cone") {
    check_keys(v, path, {"kind", "half_angle", "n", "r_min", "r_max"}, {"half_angle"});
    const double a = number(v, "half_angle", path);
    if (!(a > 0.0 && a < std::numbers::pi)) throw SchemaError(path + "/half_angle", "must lie in (0, pi)");
    const long n = integer_or(v, "n", path, 512, 0);
    const double r0 = number_or(v, "r_min", path, 1.0), r1 = number_or(v, "r_max", path, 1e3);
    if (!(r0 > 0.0 && r1 > r0)) throw SchemaError(path + "/r_max", "need 0 < r_min < r_max");
    d.sampler = SurfaceSampler::cone(a, static_cast<std::size_t>(n), r0, r1);
    d.resolved = {{"kind", d.kind}, {"half_angle", a}, {"n", n}, {"r_min", r0}, {"r_max", r1}};
  } else if (d.kind == "points") {
    check_keys(v, path, {"kind", "file", "points"});
    if (v.contains("file") == v.contains("points"))
      throw SchemaError(path, "points domain needs exactly one of 'file' or 'points'");
    d.sampler.tag = "points";
    if (v.contains("points")) {
      d.sampler.points = point_list(v.at("points"), path + "/points");
      d.resolved = {{"kind", d.kind}, {"n", d.sampler.size()}};
    } else {
      const std::string f = string(v, "file", path);
      const auto full = base_dir / f;
      std::ifstream in(full);
      if (!in) throw SchemaError(path + "/file", "cannot open " + full.string());
      json pts;
      try {
        pts = json::parse(in);
      } catch (const json::parse_error& e) {
        throw SchemaError(path + "/file", full.string() + ": " + e.what());
      }
      d.sampler.points = point_list(pts, f);
      d.resolved = {{"kind", d.kind}, {"file", f}, {"n", d.sampler.size()}};
    }
  } else {
    throw SchemaError(path + "/kind", "unknown domain kind '" + d.kind + "'");
  }
  return d;
}

inline Field3 field(const json& v, const std::string& path, ojson& resolved) {
  if (v.is_number()) {
    resolved = {{"kind", "const"}, {"value", v.get<double>()}};
    return Field3::constant(v.get<double>());
  }
  check_keys(v, path, {"kind", "value", "imag", "radii", "values", "c", "d", "beta"}, {"kind"});
  const std::string kind = string(v, "kind", path);
  if (kind == "const") {
    check_keys(v, path, {"kind", "value", "imag"}, {"value"});
    const double c = number(v, "value", path), im = number_or(v, "imag", path, 0.0);
    resolved = {{"kind", kind}, {"value", c}, {"imag", im}};
    return Field3::constant(c, im);
  }
  if (kind == "radial-table") {
    check_keys(v, path, {"kind", "radii", "values"}, {"radii", "values"});
    auto r = numbers(v.at("radii"), path + "/radii");
    auto x = numbers(v.at("values"), path + "/values");
    resolved = {{"kind", kind}, {"radii", r}, {"values", x}};
    try {
      return Field3::radial_table(std::move(r), std::move(x));
    } catch (const InvalidArgument& e) {
      throw SchemaError(path, e.what());
    }
  }
  if (kind == "so-oscillating") {
    check_keys(v, path, {"kind", "c", "d", "beta"});
    const double c = number_or(v, "c", path, 0.0), d = number_or(v, "d", path, 0.5),
                 b = number_or(v, "beta", path, 1.0);
    resolved = {{"kind", kind}, {"c", c}, {"d", d}, {"beta", b}};
    return Field3::slowly_oscillating(c, d, b);
  }
  throw SchemaError(path + "/kind", "unknown potential kind '" + kind + "'");
}

inline PotentialField potential(const json& v, const std::string& path, ojson& resolved) {
  check_keys(v, path, {"phi", "A"}, {"phi"});
  PotentialField p;
  ojson rphi;
  p.phi = field(v.at("phi"), path + "/phi", rphi);
  resolved = {{"phi", rphi}};
  if (v.contains("A")) {
    const auto& a = v.at("A");
    if (!a.is_array() || a.size() != 3) throw SchemaError(path + "/A", "expected three component fields");
    ojson ra = ojson::array();
    for (std::size_t k = 0; k < 3; ++k) {
      ojson rk;
      p.A[k] = field(a[k], path + "/A/" + std::to_string(k), rk);
      ra.push_back(rk);
    }
    resolved["A"] = ra;
  }
  return p;
}

inline AsymptoticsOptions asymptotics_options(const json& root, ojson& resolved) {
  AsymptoticsOptions o;
  if (root.contains("asymptotics")) {
    const auto& v = root.at("asymptotics");
    const std::string path = "/asymptotics";
    check_keys(v, path, {"schedule", "n_directions", "n_shells", "n_radial"});
    if (v.contains("schedule")) o.schedule = numbers(v.at("schedule"), path + "/schedule");
    o.n_directions = static_cast<std::size_t>(integer_or(v, "n_directions", path, 256, 1));
    o.n_shells = static_cast<std::size_t>(integer_or(v, "n_shells", path, 3, 1));
    o.n_radial = static_cast<std::size_t>(integer_or(v, "n_radial", path, 64, 2));
  }
  resolved = {{"schedule", o.schedule},
              {"n_directions", o.n_directions},
              {"n_shells", o.n_shells},
              {"n_radial", o.n_radial}};
  return o;
}

inline ModelProblem model(const json& root) {
  const std::string path = "/model";
  if (!root.contains("model")) throw SchemaError(path, "missing required key");
  const auto& v = root.at("model");
  check_keys(v, path, {"xi", "m"}, {"xi", "m"});
  const auto xi = numbers(v.at("xi"), path + "/xi", 2);
  return {xi[0], xi[1], number(v, "m", path)};
}

}  // namespace job

// ---------------------------------------------------------------- reports

/// Finite numbers as JSON numbers; infinities as "inf" / "-inf".
inline ojson num(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  return x;
}

inline ojson spectrum_json(const SpectrumSet& s, const std::optional<OpenInterval>& gap,
                           const std::vector<std::string>& warnings) {
  ojson iv = ojson::array();
  for (const auto& i : s.intervals()) iv.push_back(ojson::array({num(i.lo), num(i.hi)}));
  ojson out;
  out["intervals"] = iv;
  out["eigenvalues"] = s.eigenvalues();
  out["gap"] = gap ? ojson::array({num(gap->lo), num(gap->hi)}) : ojson(nullptr);
  out["warnings"] = warnings;
  return out;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

struct RunOptions {
  std::optional<std::string> dump_grid;
  unsigned threads = 1;
  std::optional<long> seed;
  std::filesystem::path base_dir = ".";
};

struct RunResult {
  ojson report;
  int exit_code = 0;  // 0 pass, 1 a check failed, 2 input error
};

namespace job {

inline const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

inline void write_grid_csv(const std::string& path, const BoundaryCondition& bc, const SurfaceSampler& sampler,
                           LSMode mode, std::size_t n) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open grid dump file " + path);
  out << "point_id,xi1,xi2,mu,re_det,im_det,abs_det\n";
  out << std::setprecision(17);
  for_each_ls_node(bc, sampler, mode, n, [&](const SurfacePoint& p, std::size_t, const ParamCovector& g, cplx d) {
    out << p.id << ',' << g.xi1 << ',' << g.xi2 << ',' << g.mu << ',' << d.real() << ',' << d.imag() << ','
        << std::abs(d) << '\n';
  });
  if (!out) throw Error("write failed for grid dump file " + path);
}

inline int run_check_ls(const json& root, const RunOptions& ro, ojson& rep) {
  check_keys(root, "", {"schema", "command", "domain", "boundary", "ls", "symmetry_tol"}, {"domain", "boundary"});
  Domain dom = domain(root.at("domain"), "/domain", ro.base_dir);
  BoundaryCondition bc = boundary(root.at("boundary"), "/boundary");
  LSOptions opt;
  if (root.contains("ls")) {
    const auto& v = root.at("ls");
    check_keys(v, "/ls", {"mode", "n_sphere", "epsilon", "polish"});
    if (v.contains("mode")) {
      const auto m = string(v, "mode", "/ls");
      if (m == "parameter")
        opt.mode = LSMode::Parameter;
      else if (m == "standard")
        opt.mode = LSMode::Standard;
      else
        throw SchemaError("/ls/mode", "expected parameter or standard");
    }
    opt.n_sphere = static_cast<std::size_t>(integer_or(v, "n_sphere", "/ls", 0, 8));
    opt.epsilon = number_or(v, "epsilon", "/ls", opt.epsilon);
    opt.polish = boolean_or(v, "polish", "/ls", opt.polish);
  }
  opt.threads = ro.threads;
  const double sym_tol = number_or(root, "symmetry_tol", "", 1e-10);
  if (dom.sampler.empty()) throw EmptySampler("/domain: sampler has no points");
  dom.sampler.validate();
  // evaluate every coefficient once so table or theta errors surface as input errors
  for (const auto& p : dom.sampler.points) (void)bc.local(p);

  if (ro.dump_grid) write_grid_csv(*ro.dump_grid, bc, dom.sampler, opt.mode, opt.resolved_n());

  const LSCertificate c = certify_ls(bc, dom.sampler, opt);
  ojson sym;
  bool sym_ok = false;
  try {
    const SymmetryResult s = check_symmetry_condition(bc, dom.sampler, sym_tol);
    sym_ok = s.pass;
    sym = {{"pass", s.pass}, {"max_residual", s.max_residual}, {"worst_point", s.worst_point}, {"tol", s.tol}};
  } catch (const NonNormalizable& e) {
    sym = {{"pass", false}, {"error", e.what()}};
  }
  rep["resolved"] = {{"domain", dom.resolved},
                     {"ls", {{"mode", to_string(opt.mode)},
                             {"n_sphere", opt.resolved_n()},
                             {"epsilon", opt.epsilon},
                             {"polish", opt.polish},
                             {"polish_starts", opt.polish_starts}}},
                     {"symmetry_tol", sym_tol}};
  rep["verdicts"] = {{"lopatinsky", c.certified ? "CERTIFIED" : "FAILED"}, {"symmetry", verdict(sym_ok)}};
  rep["result"] = {{"certificate",
                    {{"inf_estimate", c.inf_estimate},
                     {"grid_min", c.grid_min},
                     {"witness_point", c.witness_point},
                     {"witness", {{"xi1", c.witness.xi1}, {"xi2", c.witness.xi2}, {"mu", c.witness.mu}}},
                     {"n_boundary", c.n_boundary},
                     {"n_sphere", c.n_sphere},
                     {"grid_spacing", c.grid_spacing},
                     {"mode", to_string(c.mode)},
                     {"epsilon", c.epsilon},
                     {"status", c.certified ? "CERTIFIED" : "FAILED"}}},
                   {"symmetry", sym}};
  rep["warnings"] = ojson::array();
  return c.certified && sym_ok ? 0 : 1;
}

inline std::pair<AsymptoticEstimate, ojson> limits_or_estimate(const json& root) {
  ojson resolved;
  if (root.contains("limits") == root.contains("potential"))
    throw SchemaError("/", "exactly one of 'limits' or 'potential' is required");
  if (root.contains("limits")) {
    const auto& v = root.at("limits");
    check_keys(v, "/limits", {"M_sup", "M_inf"}, {"M_sup", "M_inf"});
    const double s = number(v, "M_sup", "/limits"), i = number(v, "M_inf", "/limits");
    if (i > s) throw SchemaError("/limits/M_inf", "must not exceed M_sup");
    resolved["limits"] = {{"M_sup", s}, {"M_inf", i}};
    return {AsymptoticEstimate::from_limits(s, i), resolved};
  }
  ojson rpot, rasy;
  const PotentialField p = potential(root.at("potential"), "/potential", rpot);
  const AsymptoticsOptions o = asymptotics_options(root, rasy);
  resolved["potential"] = rpot;
  resolved["asymptotics"] = rasy;
  if (!p.is_real()) throw ComplexPotential("/potential: spectral formulas require real-valued potentials");
  try {
    return {estimate_asymptotics(p, o), resolved};
  } catch (const InvalidArgument& e) {
    throw SchemaError("/asymptotics", e.what());
  }
}

inline ojson estimate_json(const AsymptoticEstimate& e) {
  ojson shells = ojson::array();
  for (const auto& s : e.shells)
    shells.push_back({{"r_inner", s.r_inner},
                      {"r_outer", s.r_outer},
                      {"phi_max", s.phi_max},
                      {"phi_min", s.phi_min},
                      {"grad_max", s.grad_max},
                      {"a_grad_max", s.a_grad_max}});
  return {{"M_sup", e.m_sup},
          {"M_inf", e.m_inf},
          {"so1_residual", e.so1_residual},
          {"a_so1_residual", e.a_so1_residual},
          {"shells", shells}};
}

inline int run_spectrum(const json& root, ojson& rep) {
  check_keys(root, "",
             {"schema", "command", "domain", "boundary", "m", "limits", "potential", "asymptotics", "so1_threshold"},
             {"m"});
  const double m = number(root, "m", "");
  std::string kind = "exterior-ball";
  if (root.contains("domain")) {
    const auto& d = root.at("domain");
    check_keys(d, "/domain", {"kind", "radius", "n", "extent", "half_angle", "r_min", "r_max", "file", "points"},
               {"kind"});
    kind = string(d, "kind", "/domain");
    if (kind != "exterior-ball" && kind != "half-space" && kind != "cone" && kind != "points")
      throw SchemaError("/domain/kind", "unknown domain kind '" + kind + "'");
  }
  const bool conic = kind == "cone" || kind == "half-space";
  if (conic) {
    if (!root.contains("boundary")) throw SchemaError("/boundary", "conic domains need a boundary condition");
    const BoundaryCondition bc = boundary(root.at("boundary"), "/boundary");
    if (bc.family() != BoundaryCondition::Family::MIT)
      throw SchemaError("/boundary/family", "the conic formula is implemented for the MIT condition only");
  } else if (root.contains("boundary")) {
    (void)boundary(root.at("boundary"), "/boundary");
  }
  const double thr = number_or(root, "so1_threshold", "", 1e-3);
  auto [est, resolved] = limits_or_estimate(root);
  resolved["m"] = m;
  resolved["domain_kind"] = kind;
  resolved["formula"] = conic ? "conic-mit" : "exterior";
  resolved["so1_threshold"] = thr;

  const SpectrumSet s = conic ? essential_spectrum_conic_mit(est, m) : essential_spectrum_exterior(est, m);
  std::optional<OpenInterval> gap;
  if (!s.is_full_line()) gap = spectral_gap(est, m);
  const auto warnings = root.contains("potential") ? so1_warnings(est, thr) : std::vector<std::string>{};
  rep["resolved"] = resolved;
  rep["verdicts"] = ojson::object();
  rep["result"] = spectrum_json(s, gap, warnings);
  if (root.contains("potential")) rep["result"]["estimate"] = estimate_json(est);
  rep["warnings"] = warnings;
  return 0;
}

inline int run_asymptotics(const json& root, ojson& rep) {
  check_keys(root, "", {"schema", "command", "potential", "asymptotics", "so1_threshold", "m"}, {"potential"});
  const double thr = number_or(root, "so1_threshold", "", 1e-3);
  auto [est, resolved] = limits_or_estimate(root);
  resolved["so1_threshold"] = thr;
  const auto warnings = so1_warnings(est, thr);
  rep["resolved"] = resolved;
  rep["verdicts"] = ojson::object();
  rep["result"] = estimate_json(est);
  if (root.contains("m")) {
    const double m = number(root, "m", "");
    rep["resolved"]["m"] = m;
    const SpectrumSet s = essential_spectrum_exterior(est, m);
    rep["result"]["spectrum"] = spectrum_json(s, s.is_full_line() ? std::nullopt : spectral_gap(est, m), warnings);
  }
  rep["warnings"] = warnings;
  return 0;
}

inline int run_model_eigen(const json& root, ojson& rep) {
  check_keys(root, "", {"schema", "command", "model", "det_tol"}, {"model"});
  const ModelProblem p = model(root);
  const double tol = number_or(root, "det_tol", "", 1e-12);
  const auto ev = model_discrete_spectrum(p);
  ojson list = ojson::array();
  bool ok = true;
  for (double l : ev) {
    const double d = std::abs(dispersion_det(p, l));
    ok = ok && d <= tol;
    list.push_back({{"lambda", l},
                    {"abs_dispersion_det", d},
                    {"nullity", bound_state_nullity(p, l)},
                    {"decay_rate", decay_rate(p, l)}});
  }
  rep["resolved"] = {{"model", {{"xi", {p.xi1, p.xi2}}, {"m", p.m}}}, {"det_tol", tol}};
  rep["verdicts"] = {{"dispersion", verdict(ok)}};
  const double t = p.threshold();
  const std::optional<OpenInterval> gap =
      t > 0.0 ? std::optional<OpenInterval>(OpenInterval{-t, t}) : std::nullopt;
  rep["result"] = spectrum_json(SpectrumSet(model_essential_spectrum(p).intervals(), ev), gap, {});
  rep["result"]["bound_states"] = list;
  rep["warnings"] = ojson::array();
  return ok ? 0 : 1;
}

inline int run_oracle_compare(const json& root, ojson& rep, std::ostream* table) {
  check_keys(root, "", {"schema", "command", "model", "oracle"}, {"model"});
  const ModelProblem p = model(root);
  HalflineGrid g;
  double tol = 5e-3;
  std::optional<OpenInterval> window;
  if (root.contains("oracle")) {
    const auto& v = root.at("oracle");
    check_keys(v, "/oracle", {"Z", "N", "tol", "window"});
    g.Z = number_or(v, "Z", "/oracle", g.Z);
    if (!(g.Z > 0.0)) throw SchemaError("/oracle/Z", "must be positive");
    g.N = static_cast<int>(integer_or(v, "N", "/oracle", g.N, 64));
    tol = number_or(v, "tol", "/oracle", tol);
    if (v.contains("window")) {
      const auto w = numbers(v.at("window"), "/oracle/window", 2);
      window = OpenInterval{w[0], w[1]};
    }
  }
  if (!(p.threshold() > 0.0)) throw SchemaError("/model", "the gap is empty for xi' = 0, m = 0");
  OracleReport r;
  try {
    r = compare(p, g, tol, window);
  } catch (const WindowOutsideGap& e) {
    throw SchemaError("/oracle/window", e.what());
  }
  auto opt = [](const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); };
  ojson matched = ojson::array();
  for (const auto& mm : r.matched)
    matched.push_back({{"exact", mm.exact},
                       {"fd", opt(mm.fd)},
                       {"shooting", opt(mm.shooting)},
                       {"fd_deviation", num(mm.fd_deviation)},
                       {"shooting_deviation", num(mm.shooting_deviation)}});
  std::vector<std::string> warnings;
  if (r.convergence_suspect) warnings.push_back("ConvergenceSuspect: doubling N moved the eigenvalue set");
  rep["resolved"] = {{"model", {{"xi", {p.xi1, p.xi2}}, {"m", p.m}}},
                     {"oracle", {{"Z", g.Z}, {"N", g.N}, {"tol", tol}, {"window", {r.window.lo, r.window.hi}}}},
                     {"shooting_scan_points", ShootingScanOptions{}.points}};
  rep["verdicts"] = {{"oracle", verdict(r.pass)}};
  rep["result"] = {{"closed_form", r.closed_form},
                   {"fd", r.fd},
                   {"fd_doubled", r.fd_doubled},
                   {"shooting", r.shooting},
                   {"hausdorff_fd", num(r.hausdorff_fd)},
                   {"hausdorff_shooting", num(r.hausdorff_shooting)},
                   {"matched", matched},
                   {"unmatched_fd", r.unmatched_fd},
                   {"unmatched_shooting", r.unmatched_shooting},
                   {"eigenvalue_shift_on_doubling", num(r.eigenvalue_shift_on_doubling)},
                   {"decay_rate_error", opt(r.decay_rate_error)},
                   {"decay_rate_error_doubled", opt(r.decay_rate_error_doubled)},
                   {"convergence_order", opt(r.convergence_order)},
                   {"convergence_suspect", r.convergence_suspect}};
  rep["warnings"] = warnings;
  if (table) {
    auto& os = *table;
    os << std::setprecision(10);
    os << "xi' = (" << p.xi1 << ", " << p.xi2 << "), m = " << p.m << ", Z = " << g.Z << ", N = " << g.N << "\n";
    os << std::left << std::setw(18) << "closed form" << std::setw(18) << "staggered fd" << std::setw(18)
       << "shooting" << "max deviation\n";
    for (const auto& mm : r.matched)
      os << std::setw(18) << mm.exact << std::setw(18) << (mm.fd ? std::to_string(*mm.fd) : "-") << std::setw(18)
         << (mm.shooting ? std::to_string(*mm.shooting) : "-")
         << std::max(mm.fd_deviation, mm.shooting_deviation) << "\n";
    if (r.matched.empty()) os << "(no eigenvalues in the window)\n";
    os << "Hausdorff fd = " << r.hausdorff_fd << ", shooting = " << r.hausdorff_shooting
       << ", verdict " << verdict(r.pass) << "\n";
  }
  return r.pass ? 0 : 1;
}

inline int run_verify_clifford(const json& root, ojson& rep) {
  check_keys(root, "", {"schema", "command"});
  const CliffordReport c = verify_clifford();
  const bool ok = c.exact_max_deviation == 0 && c.float_max_deviation == 0.0;
  rep["resolved"] = ojson::object();
  rep["verdicts"] = {{"clifford", verdict(ok)}};
  rep["result"] = {{"identities_checked", c.identities_checked},
                   {"exact_max_deviation", c.exact_max_deviation},
                   {"float_max_deviation", c.float_max_deviation}};
  rep["warnings"] = ojson::array();
  return ok ? 0 : 1;
}

}  // namespace job

/// Validates and runs a job given as JSON text. Never throws: input errors
/// become exit code 2 with a diagnostic in the report.
inline RunResult run_job(const std::string& text, const RunOptions& ro = {}, std::ostream* table = nullptr) {
  RunResult out;
  ojson& rep = out.report;
  try {
    json root;
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError("/", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw SchemaError("/", "job must be a JSON object");
    if (!root.contains("schema")) throw SchemaError("/schema", "missing required key");
    if (!root.at("schema").is_number_integer() || root.at("schema").get<long>() != kSchemaVersion)
      throw SchemaError("/schema", "unsupported schema version (expected 1)");
    if (!root.contains("command")) throw SchemaError("/command", "missing required key");
    const std::string cmd = job::string(root, "command", "");

    rep["command"] = cmd;
    rep["artifact_version"] = kVersion;
    rep["schema"] = kSchemaVersion;
    rep["input_hash"] = "sha256:" + sha256_hex(root.dump());
    rep["seed"] = ro.seed ? ojson(*ro.seed) : ojson(nullptr);
    rep["threads"] = ro.threads;

    if (ro.dump_grid && cmd != "check-ls") throw SchemaError("--dump-grid", "only valid with check-ls");
    if (cmd == "verify-clifford")
      out.exit_code = job::run_verify_clifford(root, rep);
    else if (cmd == "check-ls")
      out.exit_code = job::run_check_ls(root, ro, rep);
    else if (cmd == "spectrum")
      out.exit_code = job::run_spectrum(root, rep);
    else if (cmd == "asymptotics")
      out.exit_code = job::run_asymptotics(root, rep);
    else if (cmd == "model-eigen")
      out.exit_code = job::run_model_eigen(root, rep);
    else if (cmd == "oracle-compare")
      out.exit_code = job::run_oracle_compare(root, rep, table);
    else
      throw SchemaError("/command", "unknown command '" + cmd + "'");
    rep["status"] = out.exit_code == 0 ? "PASS" : "FAIL";
  } catch (const SchemaError& e) {
    out.exit_code = 2;
    rep["status"] = "ERROR";
    rep["error"] = {{"field", e.field}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out.exit_code = 2;
    rep["status"] = "ERROR";
    rep["error"] = {{"field", nullptr}, {"message", e.what()}};
  }
  return out;
}

}  // namespace diracbvp
