#pragma once

// Boundary symbols of the Dirac operator with spectral parameter and the
// Lopatinsky-Shapiro matrix L(x, xi', mu). Certification samples |det L|
// over boundary points x the unit sphere |xi'|^2 + mu^2 = 1 (parameter
// mode) or the circle |xi'| = 1, mu = 0 (standard mode).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "boundary.hpp"
#include "clifford.hpp"
#include "errors.hpp"
#include "matrix.hpp"

namespace diracbvp {

/// Tangential frequency xi' = (xi1, xi2) and spectral parameter mu.
struct ParamCovector {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double mu = 0.0;

  double rho() const { return std::sqrt(xi1 * xi1 + xi2 * xi2 + mu * mu); }
  cplx varsigma() const { return {xi1, xi2}; }
};

/// Lambda = sigma'.xi' - i rho sigma_3 = [[-i rho, conj(s)], [s, i rho]], s = xi1 + i xi2
inline CMat2 lambda_matrix(const ParamCovector& pc) {
  const double rho = pc.rho();
  const cplx s = pc.varsigma();
  CMat2 m{};
  m(0, 0) = -I_unit * rho;
  m(0, 1) = std::conj(s);
  m(1, 0) = s;
  m(1, 1) = I_unit * rho;
  return m;
}

/// Theta = [[i mu I2, Lambda], [Lambda, i mu I2]]. Its columns solve
/// (alpha'.xi' - i rho alpha_3 - i mu) h = 0.
inline CMat4 theta_matrix(const ParamCovector& pc) {
  const CMat2 lam = lambda_matrix(pc);
  const CMat2 d = CMat2::identity() * (I_unit * pc.mu);
  return from_blocks(d, lam, lam, d);
}

/// h1 = Theta (e1, 0), h2 = Theta (0, e2): the decaying solutions h e^{-rho z}.
inline std::pair<CVec4, CVec4> h_vectors(const ParamCovector& pc) {
  const CMat4 th = theta_matrix(pc);
  CVec4 h1{}, h2{};
  for (std::size_t i = 0; i < 4; ++i) {
    h1[i] = th(i, 0);
    h2[i] = th(i, 3);
  }
  return {h1, h2};
}

/// Columns b1 h_k^1 + b2 h_k^2, k = 1, 2.
inline CMat2 ls_matrix(const CoefficientPair& c, const ParamCovector& pc) {
  const auto [h1, h2] = h_vectors(pc);
  const auto [h11, h12] = split(h1);
  const auto [h21, h22] = split(h2);
  const CVec2 c1 = c.b1 * h11 + c.b2 * h12;
  const CVec2 c2 = c.b1 * h21 + c.b2 * h22;
  CMat2 l{};
  l(0, 0) = c1[0];
  l(1, 0) = c1[1];
  l(0, 1) = c2[0];
  l(1, 1) = c2[1];
  return l;
}

inline CMat2 ls_matrix(const BoundaryCondition& bc, const SurfacePoint& p, const ParamCovector& pc) {
  return ls_matrix(bc.local(p), pc);
}

/// det L for the MIT condition: mu rho (a^2 - 1) + 2 i a rho^2.
inline cplx mit_det_closed_form(double a, const ParamCovector& pc) {
  const double rho = pc.rho();
  return {pc.mu * rho * (a * a - 1.0), 2.0 * a * rho * rho};
}

enum class LSMode { Parameter, Standard };

inline const char* to_string(LSMode m) { return m == LSMode::Parameter ? "parameter" : "standard"; }

/// Fibonacci lattice on the unit sphere in (xi1, xi2, mu).
inline std::vector<ParamCovector> sphere_grid(std::size_t n) {
  std::vector<ParamCovector> g;
  g.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(k);
    g.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return g;
}

/// Uniform grid on |xi'| = 1 with mu = 0.
inline std::vector<ParamCovector> circle_grid(std::size_t n) {
  std::vector<ParamCovector> g;
  g.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    g.push_back({std::cos(t), std::sin(t), 0.0});
  }
  return g;
}

inline std::vector<ParamCovector> ls_grid(LSMode mode, std::size_t n) {
  return mode == LSMode::Parameter ? sphere_grid(n) : circle_grid(n);
}

/// Typical distance between neighbouring grid nodes.
inline double ls_grid_spacing(LSMode mode, std::size_t n) {
  return mode == LSMode::Parameter ? std::sqrt(4.0 * std::numbers::pi / static_cast<double>(n))
                                   : 2.0 * std::numbers::pi / static_cast<double>(n);
}

struct LSOptions {
  LSMode mode = LSMode::Parameter;
  std::size_t n_sphere = 0;  // 0 -> mode default
  double epsilon = 1e-6;
  bool polish = true;        // local search from the best grid nodes
  std::size_t polish_starts = 4;
  unsigned threads = 1;

  std::size_t resolved_n() const {
    if (n_sphere != 0) return n_sphere;
    return mode == LSMode::Parameter ? 2048 : 720;
  }
};

struct LSCertificate {
  double inf_estimate = 0.0;  // min(grid_min, polished minimum)
  double grid_min = 0.0;      // plain sampled minimum
  int witness_point = -1;
  ParamCovector witness{};
  std::size_t n_boundary = 0;
  std::size_t n_sphere = 0;
  double grid_spacing = 0.0;
  LSMode mode = LSMode::Parameter;
  double epsilon = 1e-6;
  bool certified = false;
};

namespace detail {

struct GridHit {
  double value;
  std::size_t index;  // point-major flat index
  bool operator<(const GridHit& o) const { return std::tie(value, index) < std::tie(o.value, o.index); }
};

inline void keep_best(std::vector<GridHit>& best, const GridHit& h, std::size_t k) {
  if (best.size() < k) {
    best.insert(std::upper_bound(best.begin(), best.end(), h), h);
  } else if (h < best.back()) {
    best.pop_back();
    best.insert(std::upper_bound(best.begin(), best.end(), h), h);
  }
}

// Nelder-Mead on a 2-D objective; returns (fmin, argmin).
inline std::pair<double, std::array<double, 2>> nelder_mead(
    const std::function<double(const std::array<double, 2>&)>& f, std::array<double, 2> x0, double step,
    int max_iter = 400, double ftol = 1e-15) {
  std::array<std::array<double, 2>, 3> s{x0, {x0[0] + step, x0[1]}, {x0[0], x0[1] + step}};
  std::array<double, 3> fv{f(s[0]), f(s[1]), f(s[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int i, int j) { return fv[i] < fv[j]; });
    const int b = o[0], m = o[1], w = o[2];
    if (std::abs(fv[w] - fv[b]) <= ftol && it > 10) break;
    const std::array<double, 2> c{(s[b][0] + s[m][0]) / 2, (s[b][1] + s[m][1]) / 2};
    auto along = [&](double t) {
      return std::array<double, 2>{c[0] + t * (s[w][0] - c[0]), c[1] + t * (s[w][1] - c[1])};
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fv[b]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        s[w] = xe;
        fv[w] = fe;
      } else {
        s[w] = xr;
        fv[w] = fr;
      }
    } else if (fr < fv[m]) {
      s[w] = xr;
      fv[w] = fr;
    } else {
      const auto xc = along(fr < fv[w] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[w])) {
        s[w] = xc;
        fv[w] = fc;
      } else {
        for (int i : {m, w}) {
          s[i] = {(s[i][0] + s[b][0]) / 2, (s[i][1] + s[b][1]) / 2};
          fv[i] = f(s[i]);
        }
      }
    }
  }
  const auto ib = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {fv[ib], s[ib]};
}

// Golden-section search on [lo, hi].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double lo, double hi,
                                            double xtol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2;
  return {f(x), x};
}

inline ParamCovector sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace detail

/// Visits every (point, grid node) pair in point-major order.
template <class Visitor>
void for_each_ls_node(const BoundaryCondition& bc, const SurfaceSampler& sampler, LSMode mode, std::size_t n,
                      Visitor&& visit) {
  const auto grid = ls_grid(mode, n);
  for (const auto& p : sampler.points) {
    const CoefficientPair c = bc.local(p);
    for (std::size_t k = 0; k < grid.size(); ++k) visit(p, k, grid[k], det(ls_matrix(c, grid[k])));
  }
}

/// Sampled min of |det L| at each boundary point (the local condition).
inline std::vector<double> local_ls_infima(const BoundaryCondition& bc, const SurfaceSampler& sampler, LSMode mode,
                                           std::size_t n) {
  sampler.validate();
  const auto grid = ls_grid(mode, n);
  std::vector<double> out;
  out.reserve(sampler.size());
  for (const auto& p : sampler.points) {
    const CoefficientPair c = bc.local(p);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& g : grid) m = std::min(m, std::abs(det(ls_matrix(c, g))));
    out.push_back(m);
  }
  return out;
}

/// Sampled infimum of |det L| over sampler x grid, with optional local
/// polishing from the best nodes. CERTIFIED iff inf_estimate > epsilon.
inline LSCertificate certify_ls(const BoundaryCondition& bc, const SurfaceSampler& sampler,
                                const LSOptions& opt = {}) {
  if (sampler.empty()) throw EmptySampler("certify_ls: empty sampler");
  sampler.validate();
  const std::size_t n = opt.resolved_n();
  if (n < 8) throw InvalidArgument("certify_ls: n_sphere must be >= 8");

  const auto grid = ls_grid(opt.mode, n);
  const std::size_t np = sampler.size();
  const std::size_t k_best = std::max<std::size_t>(1, opt.polish_starts);

  // evaluate in contiguous point ranges; reduction is by (value, index) so
  // the result does not depend on the thread count
  const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(np)));
  std::vector<std::vector<detail::GridHit>> partial(nt);
  auto work = [&](unsigned t) {
    const std::size_t lo = np * t / nt, hi = np * (t + 1) / nt;
    auto& best = partial[t];
    for (std::size_t i = lo; i < hi; ++i) {
      const CoefficientPair c = bc.local(sampler.points[i]);
      for (std::size_t k = 0; k < n; ++k)
        detail::keep_best(best, {std::abs(det(ls_matrix(c, grid[k]))), i * n + k}, k_best);
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<detail::GridHit> best;
  for (const auto& pb : partial)
    for (const auto& h : pb) detail::keep_best(best, h, k_best);

  LSCertificate cert;
  cert.mode = opt.mode;
  cert.n_boundary = np;
  cert.n_sphere = n;
  cert.grid_spacing = ls_grid_spacing(opt.mode, n);
  cert.epsilon = opt.epsilon;
  cert.grid_min = best.front().value;
  cert.inf_estimate = cert.grid_min;
  cert.witness_point = sampler.points[best.front().index / n].id;
  cert.witness = grid[best.front().index % n];

  if (opt.polish) {
    for (const auto& h : best) {
      const SurfacePoint& p = sampler.points[h.index / n];
      const CoefficientPair c = bc.local(p);
      const ParamCovector g = grid[h.index % n];
      double val;
      ParamCovector arg;
      if (opt.mode == LSMode::Parameter) {
        auto f = [&](const std::array<double, 2>& x) {
          return std::abs(det(ls_matrix(c, detail::sphere_point(x[0], x[1]))));
        };
        const std::array<double, 2> x0{std::acos(std::clamp(g.mu, -1.0, 1.0)), std::atan2(g.xi2, g.xi1)};
        const auto [fv, x] = detail::nelder_mead(f, x0, cert.grid_spacing);
        val = fv;
        arg = detail::sphere_point(x[0], x[1]);
      } else {
        auto f = [&](double t) { return std::abs(det(ls_matrix(c, {std::cos(t), std::sin(t), 0.0}))); };
        const double t0 = std::atan2(g.xi2, g.xi1);
        const auto [fv, t] = detail::golden_min(f, t0 - cert.grid_spacing, t0 + cert.grid_spacing);
        val = fv;
        arg = {std::cos(t), std::sin(t), 0.0};
      }
      // re-evaluate so the witness reproduces exactly
      val = std::abs(det(ls_matrix(c, arg)));
      if (val < cert.inf_estimate) {
        cert.inf_estimate = val;
        cert.witness_point = p.id;
        cert.witness = arg;
      }
    }
  }
  cert.certified = cert.inf_estimate > opt.epsilon;
  return cert;
}

}  // namespace diracbvp
