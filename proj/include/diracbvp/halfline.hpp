#pragma once

// Half-line model operator
//   (alpha'.xi' + i alpha_3 d/dz + alpha_0 m) v,  z > 0,
//   v^1(+0) + i sigma_3 v^2(+0) = 0,
// obtained from the MIT half-space problem after a Fourier transform in the
// tangential variables.

#include <cmath>
#include <utility>
#include <vector>

#include "clifford.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "spectrum_set.hpp"

namespace diracbvp {

struct ModelProblem {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double m = 0.0;

  double xi_norm() const { return std::hypot(xi1, xi2); }
  /// sqrt(|xi'|^2 + m^2): edge of the essential spectrum.
  double threshold() const { return std::sqrt(xi1 * xi1 + xi2 * xi2 + m * m); }
  cplx varsigma() const { return {xi1, xi2}; }
};

/// Eigenvalues are only accepted when the decay rate is at least this.
inline constexpr double kMinDecayRate = 1e-9;

/// rho = sqrt(|xi'|^2 + m^2 - lambda^2) inside the gap.
inline double decay_rate(const ModelProblem& p, double lambda) {
  const double r2 = p.xi1 * p.xi1 + p.xi2 * p.xi2 + p.m * p.m - lambda * lambda;
  if (!(r2 > 0.0)) throw OutsideGap("lambda = " + std::to_string(lambda) + " is not inside the spectral gap");
  return std::sqrt(r2);
}

inline SpectrumSet model_essential_spectrum(const ModelProblem& p) {
  const double t = p.threshold();
  return SpectrumSet::two_half_lines(-t, t);
}

/// (alpha'.xi' - i rho alpha_3 + alpha_0 m - lambda): the symbol acting on h e^{-rho z}.
inline CMat4 model_symbol(const ModelProblem& p, double lambda, double rho) {
  using clifford::dirac_alpha;
  return dirac_alpha(1) * cplx(p.xi1) + dirac_alpha(2) * cplx(p.xi2) - dirac_alpha(3) * (I_unit * rho) +
         dirac_alpha(0) * cplx(p.m) - CMat4::identity() * cplx(lambda);
}

/// h1 = ((lambda+m) e1, Lambda e1), h2 = (Lambda e2, (lambda-m) e2) with
/// Lambda = sigma'.xi' - i rho sigma_3.
inline std::pair<CVec4, CVec4> model_h_vectors(const ModelProblem& p, double lambda) {
  const double rho = decay_rate(p, lambda);
  const cplx s = p.varsigma();
  const CVec4 h1{{cplx(lambda + p.m), 0.0, -I_unit * rho, s}};
  const CVec4 h2{{std::conj(s), I_unit * rho, 0.0, cplx(lambda - p.m)}};
  return {h1, h2};
}

/// 2x2 matrix of the MIT condition applied to h1, h2 (columns h_k^1 + i sigma_3 h_k^2).
inline CMat2 dispersion_matrix(const ModelProblem& p, double lambda) {
  const auto [h1, h2] = model_h_vectors(p, lambda);
  const CMat2 is3 = clifford::pauli(3) * I_unit;
  const auto [a1, a2] = split(h1);
  const auto [b1, b2] = split(h2);
  const CVec2 c1 = a1 + is3 * a2;
  const CVec2 c2 = b1 + is3 * b2;
  CMat2 out{};
  out(0, 0) = c1[0];
  out(1, 0) = c1[1];
  out(0, 1) = c2[0];
  out(1, 1) = c2[1];
  return out;
}

/// Determinant of the matching system; vanishes exactly at bound states.
inline cplx dispersion_det(const ModelProblem& p, double lambda) {
  if (!(std::abs(lambda) < p.threshold()))
    throw OutsideGap("dispersion_det: |lambda| must be < " + std::to_string(p.threshold()));
  return det(dispersion_matrix(p, lambda));
}

/// 2 i rho (rho + m)
inline cplx dispersion_det_closed_form(const ModelProblem& p, double lambda) {
  const double rho = decay_rate(p, lambda);
  return {0.0, 2.0 * rho * (rho + p.m)};
}

/// Bound states: for m < 0 the branches lambda = +-|xi'| (rho = |m|); none for m >= 0.
inline std::vector<double> model_discrete_spectrum(const ModelProblem& p) {
  if (!(p.m < 0.0) || -p.m < kMinDecayRate) return {};
  const double x = p.xi_norm();
  if (x == 0.0) return {0.0};
  return {-x, x};
}

namespace detail {

// singular values (max, min) of a 2x2 matrix
inline std::pair<double, double> singular_values(const CMat2& a) {
  const double smax = spectral_norm(a);
  const double smin = smax > 0.0 ? std::abs(det(a)) / smax : 0.0;
  return {smax, smin};
}

}  // namespace detail

/// Number of independent decaying solutions satisfying the boundary
/// condition at lambda (dimension of the null space of the matching system).
inline int bound_state_nullity(const ModelProblem& p, double lambda, double rel_tol = 1e-10) {
  const CMat2 a = dispersion_matrix(p, lambda);
  const auto [h1, h2] = model_h_vectors(p, lambda);
  const double scale = std::max(norm(h1), norm(h2));
  const auto [smax, smin] = detail::singular_values(a);
  const double tol = rel_tol * std::max(1.0, scale);
  return (smax <= tol ? 1 : 0) + (smin <= tol ? 1 : 0);
}

struct DecayingSolution {
  double lambda = 0.0;
  double rho = 0.0;
  cplx c1{}, c2{};
  int nullity = 0;
  std::vector<double> z;
  std::vector<CVec4> profile;  // v(z_k), |v(0)| = 1
  double boundary_residual = 0.0;
  double max_ode_residual = 0.0;
};

/// v(z) = (C1 h1 + C2 h2) e^{-rho z} with (C1, C2) spanning the null space of
/// the matching system; throws NotAnEigenvalue if it is trivial.
inline DecayingSolution decaying_solution(const ModelProblem& p, double lambda, const std::vector<double>& z_grid,
                                          double rel_tol = 1e-10) {
  DecayingSolution s;
  s.lambda = lambda;
  s.rho = decay_rate(p, lambda);
  if (s.rho < kMinDecayRate) throw NotAnEigenvalue("decay rate below threshold at the gap edge");
  s.nullity = bound_state_nullity(p, lambda, rel_tol);
  if (s.nullity == 0)
    throw NotAnEigenvalue("lambda = " + std::to_string(lambda) + " admits only the trivial decaying solution");

  const CMat2 a = dispersion_matrix(p, lambda);
  if (s.nullity == 2) {
    s.c1 = 1.0;
    s.c2 = 0.0;
  } else {
    // null vector of a rank-one 2x2 matrix from its dominant row
    const double r0 = std::abs(a(0, 0)) + std::abs(a(0, 1));
    const double r1 = std::abs(a(1, 0)) + std::abs(a(1, 1));
    const int r = r0 >= r1 ? 0 : 1;
    s.c1 = -a(r, 1);
    s.c2 = a(r, 0);
  }
  const auto [h1, h2] = model_h_vectors(p, lambda);
  CVec4 v0 = h1 * s.c1 + h2 * s.c2;
  const double n0 = norm(v0);
  s.c1 /= n0;
  s.c2 /= n0;
  v0 = h1 * s.c1 + h2 * s.c2;

  const auto [v01, v02] = split(v0);
  s.boundary_residual = norm(CVec2(v01 + (clifford::pauli(3) * I_unit) * v02));

  // the symbol annihilates v0; the z-dependence is the scalar e^{-rho z}
  const CMat4 sym = model_symbol(p, lambda, s.rho);
  s.z = z_grid;
  s.profile.reserve(z_grid.size());
  for (double z : z_grid) {
    const CVec4 v = v0 * cplx(std::exp(-s.rho * z));
    s.profile.push_back(v);
    s.max_ode_residual = std::max(s.max_ode_residual, norm(CVec4(sym * v)));
  }
  return s;
}

}  // namespace diracbvp
