#pragma once

// Essential spectra from limit operators. For slowly oscillating real
// potentials every limit operator is a free Dirac operator shifted by a
// constant Phi^h, whose spectrum is (-inf, Phi^h - |m|] u [Phi^h + |m|, inf);
// the union over limit values collapses to the interval [M_inf, M_sup] of
// limsup/liminf of Phi at infinity.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "errors.hpp"
#include "spectrum_set.hpp"

namespace diracbvp {

/// sp D_0 = (-inf, -|m|] u [|m|, +inf)
inline SpectrumSet free_dirac_spectrum(double m) { return SpectrumSet::two_half_lines(-std::abs(m), std::abs(m)); }

/// Spectrum of the limit operator with constant potential phi_h.
inline SpectrumSet limit_constant_spectrum(double phi_h, double m) {
  if (!std::isfinite(phi_h)) throw InvalidArgument("limit_constant_spectrum: Phi^h must be finite");
  return SpectrumSet::two_half_lines(phi_h - std::abs(m), phi_h + std::abs(m));
}

/// Real (or rejected complex) field on R^3.
class Field3 {
 public:
  enum class Kind { Const, RadialTable, SlowOscillating, Callable };

  static Field3 constant(double c, double imag = 0.0) {
    Field3 f;
    f.kind_ = Kind::Const;
    f.c_ = c;
    f.imag_ = imag;
    return f;
  }

  /// Piecewise-linear in r = |x| through (radii[k], values[k]); constant
  /// continuation outside the table.
  static Field3 radial_table(std::vector<double> radii, std::vector<double> values) {
    if (radii.empty() || radii.size() != values.size())
      throw InvalidArgument("radial-table: radii and values must be nonempty and of equal length");
    for (std::size_t k = 1; k < radii.size(); ++k)
      if (!(radii[k] > radii[k - 1])) throw InvalidArgument("radial-table: radii must be strictly increasing");
    Field3 f;
    f.kind_ = Kind::RadialTable;
    f.radii_ = std::move(radii);
    f.values_ = std::move(values);
    return f;
  }

  /// c + d sin(beta log(1 + |x|)); gradient decays like 1/|x|.
  static Field3 slowly_oscillating(double c, double d, double beta) {
    Field3 f;
    f.kind_ = Kind::SlowOscillating;
    f.c_ = c;
    f.d_ = d;
    f.beta_ = beta;
    return f;
  }

  static Field3 callable(std::function<double(const Vec3&)> fn) {
    Field3 f;
    f.kind_ = Kind::Callable;
    f.fn_ = std::move(fn);
    return f;
  }

  Kind kind() const { return kind_; }
  bool is_real() const { return imag_ == 0.0; }

  double operator()(const Vec3& x) const { return radial_or_general(x); }

 private:
  double radial_or_general(const Vec3& x) const {
    switch (kind_) {
      case Kind::Const:
        return c_;
      case Kind::RadialTable: {
        const double r = norm(x);
        if (r <= radii_.front()) return values_.front();
        if (r >= radii_.back()) return values_.back();
        const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
        const std::size_t k = static_cast<std::size_t>(it - radii_.begin());
        const double t = (r - radii_[k - 1]) / (radii_[k] - radii_[k - 1]);
        return values_[k - 1] + t * (values_[k] - values_[k - 1]);
      }
      case Kind::SlowOscillating:
        return c_ + d_ * std::sin(beta_ * std::log1p(norm(x)));
      case Kind::Callable:
        return fn_(x);
    }
    return 0.0;
  }

  Kind kind_ = Kind::Const;
  double c_ = 0.0, d_ = 0.0, beta_ = 0.0, imag_ = 0.0;
  std::vector<double> radii_, values_;
  std::function<double(const Vec3&)> fn_;
};

/// Electrostatic potential Phi and magnetic potential A.
struct PotentialField {
  Field3 phi = Field3::constant(0.0);
  std::array<Field3, 3> A{Field3::constant(0.0), Field3::constant(0.0), Field3::constant(0.0)};

  bool is_real() const { return phi.is_real() && A[0].is_real() && A[1].is_real() && A[2].is_real(); }
};

struct ShellStats {
  double r_inner = 0.0;
  double r_outer = 0.0;
  double phi_max = 0.0;
  double phi_min = 0.0;
  double grad_max = 0.0;    // max |grad Phi|
  double a_grad_max = 0.0;  // max over components of |grad A_j|
};

struct AsymptoticEstimate {
  double m_sup = 0.0;
  double m_inf = 0.0;
  std::vector<double> schedule;
  std::size_t n_directions = 0;
  std::size_t n_radial = 0;
  std::size_t n_shells = 0;
  double so1_residual = 0.0;    // max |grad Phi| on the shells used
  double a_so1_residual = 0.0;  // same for A
  std::vector<ShellStats> shells;  // one per schedule entry, innermost first
  std::vector<Vec3> directions;
  std::vector<double> direction_sup;  // per-direction extremes over the shells used
  std::vector<double> direction_inf;

  /// Estimate with given limits and no sampling metadata.
  static AsymptoticEstimate from_limits(double sup, double inf) {
    if (!(inf <= sup)) throw InvalidArgument("asymptotics: M_inf must not exceed M_sup");
    AsymptoticEstimate e;
    e.m_sup = sup;
    e.m_inf = inf;
    return e;
  }
};

struct AsymptoticsOptions {
  std::vector<double> schedule{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::size_t n_directions = 256;
  std::size_t n_shells = 3;
  std::size_t n_radial = 64;  // log-uniform radial samples per shell
};

namespace detail {

inline std::vector<Vec3> fibonacci_directions(std::size_t n) {
  std::vector<Vec3> d;
  d.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(k);
    d.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }
  return d;
}

inline double gradient_norm(const Field3& f, const Vec3& x) {
  const double h = 1e-4 * (1.0 + norm(x));
  double s = 0.0;
  for (int j = 0; j < 3; ++j) {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double g = (f(xp) - f(xm)) / (2.0 * h);
    s += g * g;
  }
  return std::sqrt(s);
}

}  // namespace detail

/// limsup / liminf of Phi estimated as max / min over the outermost shells
/// of a radial schedule; shell k spans [R_{k-1}, R_k] (the first one is
/// continued geometrically inward).
inline AsymptoticEstimate estimate_asymptotics(const PotentialField& p, const AsymptoticsOptions& opt = {}) {
  if (!p.is_real()) throw ComplexPotential("spectral formulas require real-valued potentials");
  const auto& R = opt.schedule;
  if (R.size() < opt.n_shells || opt.n_shells == 0)
    throw ScheduleTooShort("schedule has " + std::to_string(R.size()) + " radii, need at least " +
                           std::to_string(std::max<std::size_t>(opt.n_shells, 1)));
  for (std::size_t k = 0; k < R.size(); ++k)
    if (!(R[k] > 0.0) || (k > 0 && !(R[k] > R[k - 1])))
      throw InvalidArgument("schedule must be positive and strictly increasing");
  if (opt.n_directions == 0 || opt.n_radial < 2) throw InvalidArgument("asymptotics: sampling counts too small");

  AsymptoticEstimate e;
  e.schedule = R;
  e.n_directions = opt.n_directions;
  e.n_radial = opt.n_radial;
  e.n_shells = opt.n_shells;
  e.directions = detail::fibonacci_directions(opt.n_directions);
  e.direction_sup.assign(opt.n_directions, -kInf);
  e.direction_inf.assign(opt.n_directions, kInf);

  const std::size_t first_used = R.size() - opt.n_shells;
  e.m_sup = -kInf;
  e.m_inf = kInf;
  for (std::size_t k = 0; k < R.size(); ++k) {
    ShellStats s;
    s.r_outer = R[k];
    s.r_inner = k > 0 ? R[k - 1] : (R.size() > 1 ? R[0] * R[0] / R[1] : R[0] / 10.0);
    s.phi_max = -kInf;
    s.phi_min = kInf;
    const bool used = k >= first_used;
    for (std::size_t j = 0; j < opt.n_radial; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(opt.n_radial - 1);
      const double r = s.r_inner * std::pow(s.r_outer / s.r_inner, t);
      for (std::size_t d = 0; d < e.directions.size(); ++d) {
        const Vec3 x = scaled(e.directions[d], r);
        const double v = p.phi(x);
        s.phi_max = std::max(s.phi_max, v);
        s.phi_min = std::min(s.phi_min, v);
        s.grad_max = std::max(s.grad_max, detail::gradient_norm(p.phi, x));
        for (const auto& a : p.A) s.a_grad_max = std::max(s.a_grad_max, detail::gradient_norm(a, x));
        if (used) {
          e.direction_sup[d] = std::max(e.direction_sup[d], v);
          e.direction_inf[d] = std::min(e.direction_inf[d], v);
        }
      }
    }
    if (used) {
      e.m_sup = std::max(e.m_sup, s.phi_max);
      e.m_inf = std::min(e.m_inf, s.phi_min);
      e.so1_residual = std::max(e.so1_residual, s.grad_max);
      e.a_so1_residual = std::max(e.a_so1_residual, s.a_grad_max);
    }
    e.shells.push_back(s);
  }
  return e;
}

/// (-inf, M_sup - |m|] u [M_inf + |m|, +inf); the whole line once M_sup - M_inf >= 2|m|.
inline SpectrumSet essential_spectrum_exterior(const AsymptoticEstimate& est, double m) {
  return SpectrumSet::two_half_lines(est.m_sup - std::abs(m), est.m_inf + std::abs(m));
}

/// MIT condition on a domain with a conic exit: the exterior formula for
/// m >= 0; for m < 0 the half-space limit operators carry eigenvalue branches
/// +-|xi'| that sweep the whole line.
inline SpectrumSet essential_spectrum_conic_mit(const AsymptoticEstimate& est, double m) {
  if (m < 0.0) return SpectrumSet::full_line();
  return essential_spectrum_exterior(est, m);
}

/// (M_sup - |m|, M_inf + |m|) when M_sup - M_inf < 2|m|.
inline std::optional<OpenInterval> spectral_gap(const AsymptoticEstimate& est, double m) {
  const double am = std::abs(m);
  if (est.m_sup - est.m_inf < 2.0 * am) return OpenInterval{est.m_sup - am, est.m_inf + am};
  return std::nullopt;
}

/// Warnings for estimates whose sampled gradients are not small enough to
/// trust the slowly-oscillating hypothesis.
inline std::vector<std::string> so1_warnings(const AsymptoticEstimate& est, double threshold = 1e-3) {
  std::vector<std::string> w;
  if (est.so1_residual > threshold)
    w.push_back("Phi gradient " + std::to_string(est.so1_residual) + " on the outer shells exceeds " +
                std::to_string(threshold) + "; slowly-oscillating hypothesis not confirmed");
  if (est.a_so1_residual > threshold)
    w.push_back("A gradient " + std::to_string(est.a_so1_residual) + " on the outer shells exceeds " +
                std::to_string(threshold) + "; slowly-oscillating hypothesis for A not confirmed");
  return w;
}

}  // namespace diracbvp
