#pragma once

// Two independent numerical checks of the half-line model spectrum.
//
// Staggered finite differences. In the rotated unknowns
//   p = (v1 + i sigma_3 v2)/sqrt2,  q = (v1 - i sigma_3 v2)/sqrt2
// the boundary condition reads p(0) = 0 and the operator becomes
//   H p = m q - q' + K p,   H q = m p + p' - K q,   K = i sigma_3 (sigma'.xi').
// p lives on integer nodes z_j = j h, q on half-integer nodes (j - 1/2) h.
// Mass terms average the two neighbours, derivatives are one-cell
// differences; the resulting matrix is Hermitian with bandwidth 2 in the
// ordering [q1_j, q2_j, p1_j, p2_j]. A constant phase on the second spinor
// component turns K into |xi'| sigma_1, so the matrix is assembled real
// symmetric with unchanged eigenvalues and eigenvector moduli. The
// truncation wall removes p_N when m < 0 and q_{N+1} when m >= 0, so that
// neither component can support a wall-localised state in the gap.
//
// Transfer shooting. v' = G v with G = -i alpha_3 (lambda - alpha'.xi' - alpha_0 m);
// the decaying eigenspace of G is propagated from z = Z to 0 with RK4 and
// re-orthonormalised each step; the boundary operator [I, i sigma_3] applied
// to the orthonormal frame gives a scale-free 2x2 determinant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include "clifford.hpp"
#include "errors.hpp"
#include "halfline.hpp"
#include "spectrum_set.hpp"

namespace diracbvp {

enum class Scheme { StaggeredFD, TransferShooting };

inline std::string to_string(Scheme s) { return s == Scheme::StaggeredFD ? "staggered-fd" : "transfer-shooting"; }

struct HalflineGrid {
  double Z = 40.0;
  int N = 4096;
  Scheme scheme = Scheme::StaggeredFD;

  double h() const { return Z / N; }
  void validate() const {
    if (!(Z > 0.0) || !std::isfinite(Z)) throw InvalidArgument("HalflineGrid: Z must be positive");
    if (N < 64) throw InvalidArgument("HalflineGrid: N must be at least 64");
  }
  HalflineGrid doubled() const { return {Z, 2 * N, scheme}; }
};

/// Open gap of the model problem shrunk by a relative margin.
inline OpenInterval default_window(const ModelProblem& p, double rel_margin = 1e-6) {
  const double t = p.threshold() * (1.0 - rel_margin);
  return {-t, t};
}

namespace detail {

/// Symmetric band matrix, upper storage, column-major, kd = 2.
struct StaggeredOperator {
  static constexpr int kd = 2;
  int n = 0;
  int n_blocks = 0;
  bool p_wall = false;
  std::vector<double> ab;  // (kd + 1) x n

  double& upper(int i, int j) { return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)]; }
  double at(int i, int j) const {
    if (i > j) return at(j, i);
    if (j - i > kd) return 0.0;
    return ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * (kd + 1)];
  }
};

inline StaggeredOperator assemble_staggered(const ModelProblem& p, const HalflineGrid& g) {
  g.validate();
  StaggeredOperator A;
  A.n_blocks = g.N;
  A.p_wall = p.m < 0.0;
  A.n = 4 * g.N - (A.p_wall ? 2 : 0);
  A.ab.assign(static_cast<std::size_t>(A.kd + 1) * A.n, 0.0);
  const double h = g.h();
  const double c_near = 0.5 * p.m + 1.0 / h;  // p_j with q_j
  const double c_far = 0.5 * p.m - 1.0 / h;   // p_j with q_{j+1}
  const double k12 = p.xi_norm();  // K = [[0, i conj(s)], [-i s, 0]] after the phase change

  auto q1 = [](int j) { return 4 * j; };
  auto q2 = [](int j) { return 4 * j + 1; };
  auto p1 = [](int j) { return 4 * j + 2; };
  auto p2 = [](int j) { return 4 * j + 3; };
  for (int j = 0; j < g.N; ++j) {
    A.upper(q1(j), q2(j)) = -k12;  // -K on q
    const bool has_p = !(A.p_wall && j == g.N - 1);
    if (!has_p) continue;
    A.upper(q1(j), p1(j)) = c_near;
    A.upper(q2(j), p2(j)) = c_near;
    A.upper(p1(j), p2(j)) = k12;
    if (j + 1 < g.N) {
      A.upper(p1(j), q1(j + 1)) = c_far;
      A.upper(p2(j), q2(j + 1)) = c_far;
    }
  }
  return A;
}

/// Inverse iteration with banded LU: eigenvector for the eigenvalue nearest `shift`.
inline std::vector<double> inverse_iteration(const StaggeredOperator& A, double shift, int iterations = 3) {
  const int kl = A.kd, ku = A.kd, ldab = 2 * kl + ku + 1;
  const int n = A.n;
  std::vector<double> lu(static_cast<std::size_t>(ldab) * n);
  std::vector<lapack_int> ipiv(n);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.37 * i);
  for (int it = 0; it < iterations; ++it) {
    std::fill(lu.begin(), lu.end(), 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
        lu[static_cast<std::size_t>(kl + ku + i - j) + static_cast<std::size_t>(j) * ldab] =
            A.at(i, j) - (i == j ? shift : 0.0);
    const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, lu.data(), ldab, ipiv.data(), x.data(), n);
    if (info < 0) throw Error("dgbsv: illegal argument " + std::to_string(-info));
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw Error("inverse iteration broke down");
    for (auto& v : x) v /= nrm;
  }
  return x;
}

}  // namespace detail

/// In-window eigenvalues of the staggered discretisation, sorted, repeated
/// according to multiplicity.
inline std::vector<double> fd_eigenvalues(const ModelProblem& p, const HalflineGrid& g, const OpenInterval& window) {
  const double t = p.threshold();
  if (!(window.lo < window.hi) || window.lo < -t || window.hi > t)
    throw WindowOutsideGap("window (" + format_endpoint(window.lo) + ", " + format_endpoint(window.hi) +
                           ") is not inside the gap (" + format_endpoint(-t) + ", " + format_endpoint(t) + ")");
  auto A = detail::assemble_staggered(p, g);
  const lapack_int n = A.n;
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  std::vector<double> qdummy(1), zdummy(1);
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'V', 'U', n, A.kd, A.ab.data(), A.kd + 1, qdummy.data(), 1, window.lo,
                     window.hi, 0, 0, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), zdummy.data(), 1, ifail.data());
  if (info != 0) throw Error("dsbevx failed with info = " + std::to_string(info));
  std::vector<double> out;
  for (lapack_int k = 0; k < found; ++k)
    if (window.contains(w[k])) out.push_back(w[k]);
  std::sort(out.begin(), out.end());
  return out;
}

struct DecayFit {
  double eigenvalue = 0.0;
  double rate = 0.0;  // fitted exponential decay rate of |q|
};

/// Decay rate of the discrete eigenvector at an in-gap eigenvalue, fitted by
/// least squares to log|q_j| over 1 <= z <= min(10/rate_guess, Z/2).
inline DecayFit fd_decay_rate(const ModelProblem& p, const HalflineGrid& g, double eigenvalue, double rate_guess) {
  const auto A = detail::assemble_staggered(p, g);
  const double scale = 1.0 / g.h() + std::abs(p.m) + p.xi_norm();
  const auto x = detail::inverse_iteration(A, eigenvalue + 1e-9 * scale);
  const double z_hi = std::min(10.0 / std::max(rate_guess, 1e-3), 0.5 * g.Z);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int j = 0; j < g.N; ++j) {
    const double z = (j + 0.5) * g.h();
    if (z < 1.0 || z > z_hi) continue;
    const double a = std::hypot(x[4 * j], x[4 * j + 1]);
    if (!(a > 0.0)) continue;
    const double y = std::log(a);
    sx += z;
    sy += y;
    sxx += z * z;
    sxy += z * y;
    ++cnt;
  }
  if (cnt < 2) throw Error("fd_decay_rate: fitting window holds fewer than two nodes");
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return {eigenvalue, -slope};
}

/// |det [I, i sigma_3] Y(0)| where Y spans the decaying solutions, propagated
/// from z = Z to 0 and kept orthonormal.
inline double shooting_det(const ModelProblem& p, double lambda, const HalflineGrid& g) {
  g.validate();
  const double t = p.threshold();
  if (!(std::abs(lambda) < t))
    throw OutsideGap("shooting_det: lambda = " + std::to_string(lambda) + " is not inside the gap");

  using M4 = Eigen::Matrix4cd;
  using M42 = Eigen::Matrix<cplx, 4, 2>;
  auto to_eigen = [](const CMat4& a) {
    M4 e;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) e(i, j) = a(i, j);
    return e;
  };
  const M4 a3 = to_eigen(clifford::dirac_alpha(3));
  const M4 B = to_eigen(clifford::dirac_alpha(1) * cplx(p.xi1) + clifford::dirac_alpha(2) * cplx(p.xi2) +
                        clifford::dirac_alpha(0) * cplx(p.m));
  const M4 G = -I_unit * a3 * (lambda * M4::Identity() - B);

  // decaying subspace from the spectrum of G: rho from the eigenvalues,
  // then the range of the spectral projector (I - G/rho)/2
  Eigen::ComplexEigenSolver<M4> es(G, false);
  double rho = 0.0;
  for (int k = 0; k < 4; ++k) rho += std::abs(es.eigenvalues()(k).real());
  rho /= 4.0;
  if (!(rho > 0.0)) throw OutsideGap("shooting_det: no decaying solutions at the gap edge");
  const M4 P = 0.5 * (M4::Identity() - G / rho);
  Eigen::ColPivHouseholderQR<M4> qr0(P);
  M42 Y = (qr0.householderQ() * M4::Identity()).leftCols<2>();

  const double h = g.h();
  const M4 Gb = -h * G;  // backward step in z
  const M4 step = M4::Identity() + Gb + Gb * Gb / 2.0 + Gb * Gb * Gb / 6.0 + Gb * Gb * Gb * Gb / 24.0;
  for (int k = 0; k < g.N; ++k) {
    Y = step * Y;
    Y.col(0).normalize();
    Y.col(1) -= Y.col(0) * Y.col(0).dot(Y.col(1));
    Y.col(1).normalize();
  }
  Eigen::Matrix<cplx, 2, 4> bc = Eigen::Matrix<cplx, 2, 4>::Zero();
  bc(0, 0) = 1.0;
  bc(1, 1) = 1.0;
  bc(0, 2) = I_unit;
  bc(1, 3) = -I_unit;
  return std::abs((bc * Y).determinant());
}

struct ShootingScanOptions {
  int points = 2001;
  double lambda_tol = 1e-10;
  double accept = 1e-6;  // |det| below this at a refined minimum counts as a root
};

/// Roots of shooting_det in the window: uniform scan, interior local minima
/// refined by golden-section search on |det|.
inline std::vector<double> shooting_roots(const ModelProblem& p, const HalflineGrid& g, const OpenInterval& window,
                                          const ShootingScanOptions& opt = {}) {
  const double t = p.threshold();
  if (!(window.lo < window.hi) || window.lo < -t || window.hi > t)
    throw WindowOutsideGap("shooting window is not inside the gap");
  const int n = opt.points;
  std::vector<double> lam(n), val(n);
  for (int k = 0; k < n; ++k) {
    lam[k] = window.lo + (window.hi - window.lo) * (k + 1) / (n + 1);
    val[k] = shooting_det(p, lam[k], g);
  }
  std::vector<double> roots;
  for (int k = 0; k < n; ++k) {
    const bool left_ok = k == 0 || val[k] <= val[k - 1];
    const bool right_ok = k == n - 1 || val[k] < val[k + 1];
    if (!(left_ok && right_ok)) continue;
    double a = k == 0 ? window.lo + 0.5 * (lam[0] - window.lo) : lam[k - 1];
    double b = k == n - 1 ? window.hi - 0.5 * (window.hi - lam[n - 1]) : lam[k + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = shooting_det(p, c, g), fd = shooting_det(p, d, g);
    while (b - a > opt.lambda_tol) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = shooting_det(p, c, g);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = shooting_det(p, d, g);
      }
    }
    double best = 0.5 * (a + b), fbest = shooting_det(p, best, g);
    if (val[k] < fbest) {
      best = lam[k];
      fbest = val[k];
    }
    if (fbest <= opt.accept) roots.push_back(best);
  }
  return roots;
}

/// Hausdorff distance between finite point sets; 0 for two empty sets and
/// +inf when exactly one is empty.
inline double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  auto directed = [](const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (double u : x) {
      double best = kInf;
      for (double v : y) best = std::min(best, std::abs(u - v));
      d = std::max(d, best);
    }
    return d;
  };
  return std::max(directed(a, b), directed(b, a));
}

struct MatchedEigenvalue {
  double exact = 0.0;
  std::optional<double> fd;
  std::optional<double> shooting;
  double fd_deviation = kInf;
  double shooting_deviation = kInf;
};

struct OracleReport {
  ModelProblem problem;
  HalflineGrid grid;
  OpenInterval window;
  double tol = 0.0;
  std::vector<double> closed_form;
  std::vector<double> fd;
  std::vector<double> fd_doubled;
  std::vector<double> shooting;
  double hausdorff_fd = 0.0;
  double hausdorff_shooting = 0.0;
  std::vector<MatchedEigenvalue> matched;
  std::vector<double> unmatched_fd;
  std::vector<double> unmatched_shooting;
  double eigenvalue_shift_on_doubling = 0.0;
  std::optional<double> decay_rate_error;          // at N
  std::optional<double> decay_rate_error_doubled;  // at 2N
  std::optional<double> convergence_order;
  bool convergence_suspect = false;
  bool pass = false;
};

/// Convergence flag: doubling N moves the in-window set by more than 10 tol,
/// or changes the number of eigenvalues found.
inline bool convergence_suspect(const std::vector<double>& coarse, const std::vector<double>& fine, double tol) {
  if (coarse.size() != fine.size()) return true;
  return hausdorff(coarse, fine) > 10.0 * tol;
}

/// log2 of the error ratio between N and 2N; empty when either error is at
/// roundoff level.
inline std::optional<double> observed_order(double err_coarse, double err_fine, double floor = 1e-13) {
  if (!(err_coarse > floor) || !(err_fine > floor)) return std::nullopt;
  return std::log2(err_coarse / err_fine);
}

inline OracleReport compare(const ModelProblem& p, const HalflineGrid& g, double tol,
                            std::optional<OpenInterval> window = std::nullopt) {
  g.validate();
  OracleReport r;
  r.problem = p;
  r.grid = g;
  r.tol = tol;
  r.window = window.value_or(default_window(p));
  for (double e : model_discrete_spectrum(p))
    if (r.window.contains(e)) r.closed_form.push_back(e);
  // nullity two at xi' = 0: the closed form lists the point once
  r.fd = fd_eigenvalues(p, g, r.window);
  const HalflineGrid g2 = g.doubled();
  r.fd_doubled = fd_eigenvalues(p, g2, r.window);
  r.shooting = shooting_roots(p, {g.Z, g.N, Scheme::TransferShooting}, r.window);
  r.hausdorff_fd = hausdorff(r.closed_form, r.fd);
  r.hausdorff_shooting = hausdorff(r.closed_form, r.shooting);

  auto nearest = [](const std::vector<double>& xs, double x) -> std::optional<double> {
    std::optional<double> best;
    for (double v : xs)
      if (!best || std::abs(v - x) < std::abs(*best - x)) best = v;
    return best;
  };
  for (double e : r.closed_form) {
    MatchedEigenvalue mm;
    mm.exact = e;
    if (auto f = nearest(r.fd, e); f && std::abs(*f - e) <= tol) {
      mm.fd = f;
      mm.fd_deviation = std::abs(*f - e);
    }
    if (auto s = nearest(r.shooting, e); s && std::abs(*s - e) <= tol) {
      mm.shooting = s;
      mm.shooting_deviation = std::abs(*s - e);
    }
    r.matched.push_back(mm);
  }
  for (double f : r.fd)
    if (auto e = nearest(r.closed_form, f); !e || std::abs(*e - f) > tol) r.unmatched_fd.push_back(f);
  for (double s : r.shooting)
    if (auto e = nearest(r.closed_form, s); !e || std::abs(*e - s) > tol) r.unmatched_shooting.push_back(s);

  r.eigenvalue_shift_on_doubling =
      r.fd.size() == r.fd_doubled.size() ? hausdorff(r.fd, r.fd_doubled) : kInf;
  r.convergence_suspect = convergence_suspect(r.fd, r.fd_doubled, tol);

  // eigenvalues of the staggered scheme are exact for this family, so
  // the grid dependence is measured on the eigenvector decay rate
  if (!r.closed_form.empty() && r.fd.size() == r.fd_doubled.size() && !r.fd.empty()) {
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t k = 0; k < r.fd.size(); ++k) {
      const double rho = decay_rate(p, std::clamp(r.fd[k], -p.threshold() * (1 - 1e-12), p.threshold() * (1 - 1e-12)));
      e1 = std::max(e1, std::abs(fd_decay_rate(p, g, r.fd[k], rho).rate - rho));
      e2 = std::max(e2, std::abs(fd_decay_rate(p, g2, r.fd_doubled[k], rho).rate - rho));
    }
    r.decay_rate_error = e1;
    r.decay_rate_error_doubled = e2;
    r.convergence_order = observed_order(e1, e2);
  }
  r.pass = r.hausdorff_fd <= tol && r.hausdorff_shooting <= tol;
  return r;
}

}  // namespace diracbvp
