#pragma once

// Pauli and Dirac matrices in the standard representation, contractions
// with 3-vectors, and the anticommutator check.

#include <array>
#include <complex>
#include <cstdlib>
#include <string>

#include "errors.hpp"
#include "matrix.hpp"

namespace diracbvp {

using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

namespace clifford {

/// Pauli matrix sigma_j, j in {1,2,3}. Z is a complex scalar type
/// (std::complex<double> or std::complex<int>).
template <class Z = cplx>
constexpr Mat<Z, 2, 2> pauli(int j) {
  using R = typename Z::value_type;
  Mat<Z, 2, 2> s{};
  switch (j) {
    case 1:
      s(0, 1) = Z(1, 0);
      s(1, 0) = Z(1, 0);
      break;
    case 2:
      s(0, 1) = Z(0, R(-1));
      s(1, 0) = Z(0, 1);
      break;
    case 3:
      s(0, 0) = Z(1, 0);
      s(1, 1) = Z(R(-1), 0);
      break;
    default:
      throw IndexOutOfRange("pauli: index " + std::to_string(j) + " not in {1,2,3}");
  }
  return s;
}

/// alpha_0 = diag(I2, -I2); alpha_j = [[0, sigma_j], [sigma_j, 0]].
template <class Z = cplx>
constexpr Mat<Z, 4, 4> dirac_alpha(int j) {
  using M2 = Mat<Z, 2, 2>;
  if (j == 0) return from_blocks(M2::identity(), M2::zero(), M2::zero(), -M2::identity());
  if (j < 0 || j > 3)
    throw IndexOutOfRange("dirac_alpha: index " + std::to_string(j) + " not in {0,1,2,3}");
  const M2 s = pauli<Z>(j);
  return from_blocks(M2::zero(), s, s, M2::zero());
}

}  // namespace clifford

/// sigma . v
inline CMat2 sigma_dot(const CVec3& v) {
  CMat2 out{};
  for (int j = 0; j < 3; ++j) out += clifford::pauli(j + 1) * v[j];
  return out;
}

inline CMat2 sigma_dot(const Vec3& v) {
  return sigma_dot(CVec3{cplx(v[0]), cplx(v[1]), cplx(v[2])});
}

/// alpha . v = alpha_1 v_1 + alpha_2 v_2 + alpha_3 v_3
inline CMat4 alpha_dot(const CVec3& v) {
  CMat4 out{};
  for (int j = 0; j < 3; ++j) out += clifford::dirac_alpha(j + 1) * v[j];
  return out;
}

inline CMat4 alpha_dot(const Vec3& v) {
  return alpha_dot(CVec3{cplx(v[0]), cplx(v[1]), cplx(v[2])});
}

struct CliffordReport {
  // Max |entry| of sigma_j sigma_k + sigma_k sigma_j - 2 delta_jk I2 and of
  // alpha_j alpha_k + alpha_k alpha_j - 2 delta_jk I4, in Gaussian integers.
  long exact_max_deviation = 0;
  // Same identities evaluated in double precision.
  double float_max_deviation = 0.0;
  int identities_checked = 0;
};

namespace clifford {

template <class Z, std::size_t N>
Mat<Z, N, N> anticommutator_defect(const Mat<Z, N, N>& x, const Mat<Z, N, N>& y, bool same) {
  Mat<Z, N, N> d = x * y + y * x;
  if (same) d -= Mat<Z, N, N>::identity() * Z(2, 0);
  return d;
}

inline long exact_abs(const Mat<std::complex<int>, 2, 2>& m) {
  long out = 0;
  for (const auto& v : m.a) out = std::max<long>(out, std::abs(v.real()) + std::abs(v.imag()));
  return out;
}
inline long exact_abs(const Mat<std::complex<int>, 4, 4>& m) {
  long out = 0;
  for (const auto& v : m.a) out = std::max<long>(out, std::abs(v.real()) + std::abs(v.imag()));
  return out;
}

}  // namespace clifford

/// Checks the 16 Dirac anticommutators (and the 9 Pauli ones, which they
/// rest on) exactly and in floating point.
inline CliffordReport verify_clifford() {
  using Z = std::complex<int>;
  CliffordReport r;
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      const auto dz = clifford::anticommutator_defect(clifford::pauli<Z>(j), clifford::pauli<Z>(k), j == k);
      const auto dd = clifford::anticommutator_defect(clifford::pauli<cplx>(j), clifford::pauli<cplx>(k), j == k);
      r.exact_max_deviation = std::max(r.exact_max_deviation, clifford::exact_abs(dz));
      r.float_max_deviation = std::max(r.float_max_deviation, max_abs(dd));
      ++r.identities_checked;
    }
  for (int j = 0; j <= 3; ++j)
    for (int k = 0; k <= 3; ++k) {
      const auto dz =
          clifford::anticommutator_defect(clifford::dirac_alpha<Z>(j), clifford::dirac_alpha<Z>(k), j == k);
      const auto dd =
          clifford::anticommutator_defect(clifford::dirac_alpha<cplx>(j), clifford::dirac_alpha<cplx>(k), j == k);
      r.exact_max_deviation = std::max(r.exact_max_deviation, clifford::exact_abs(dz));
      r.float_max_deviation = std::max(r.float_max_deviation, max_abs(dd));
      ++r.identities_checked;
    }
  return r;
}

}  // namespace diracbvp
