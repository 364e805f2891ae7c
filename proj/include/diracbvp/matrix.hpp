#pragma once

// Small fixed-size dense matrices used for spinor algebra.
//
// The scalar type is a template parameter so the same code runs in
// std::complex<double> for numerics and std::complex<int> (Gaussian
// integers) for exact identity checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <utility>

namespace diracbvp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using cplx = std::complex<double>;
inline constexpr cplx I_unit{0.0, 1.0};

template <class T, std::size_t R, std::size_t C>
struct Mat {
  static constexpr std::size_t rows = R;
  static constexpr std::size_t cols = C;

  std::array<T, R * C> a{};

  constexpr T& operator()(std::size_t i, std::size_t j) { return a[i * C + j]; }
  constexpr const T& operator()(std::size_t i, std::size_t j) const { return a[i * C + j]; }

  // vector-style access for column vectors
  constexpr T& operator[](std::size_t i) requires(C == 1) { return a[i]; }
  constexpr const T& operator[](std::size_t i) const requires(C == 1) { return a[i]; }

  static constexpr Mat zero() { return Mat{}; }

  static constexpr Mat identity() requires(R == C) {
    Mat m{};
    for (std::size_t i = 0; i < R; ++i) m(i, i) = T(1);
    return m;
  }

  constexpr Mat& operator+=(const Mat& o) {
    for (std::size_t k = 0; k < R * C; ++k) a[k] += o.a[k];
    return *this;
  }
  constexpr Mat& operator-=(const Mat& o) {
    for (std::size_t k = 0; k < R * C; ++k) a[k] -= o.a[k];
    return *this;
  }
  constexpr Mat& operator*=(const T& s) {
    for (auto& x : a) x *= s;
    return *this;
  }

  friend constexpr bool operator==(const Mat&, const Mat&) = default;
};

template <class T, std::size_t N>
using Vec = Mat<T, N, 1>;

using CMat2 = Mat<cplx, 2, 2>;
using CMat4 = Mat<cplx, 4, 4>;
using CVec2 = Vec<cplx, 2>;
using CVec4 = Vec<cplx, 4>;

// Gaussian-integer counterparts for exact arithmetic.
using ZMat2 = Mat<std::complex<int>, 2, 2>;
using ZMat4 = Mat<std::complex<int>, 4, 4>;

template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, R, C> operator+(Mat<T, R, C> x, const Mat<T, R, C>& y) {
  return x += y;
}
template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, R, C> operator-(Mat<T, R, C> x, const Mat<T, R, C>& y) {
  return x -= y;
}
template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, R, C> operator-(Mat<T, R, C> x) {
  for (auto& v : x.a) v = -v;
  return x;
}
template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, R, C> operator*(Mat<T, R, C> x, const T& s) {
  return x *= s;
}
template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, R, C> operator*(const T& s, Mat<T, R, C> x) {
  return x *= s;
}

template <class T, std::size_t R, std::size_t K, std::size_t C>
constexpr Mat<T, R, C> operator*(const Mat<T, R, K>& x, const Mat<T, K, C>& y) {
  Mat<T, R, C> out{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const T xik = x(i, k);
      for (std::size_t j = 0; j < C; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

template <class T, std::size_t R, std::size_t C>
constexpr Mat<T, C, R> adjoint(const Mat<T, R, C>& x) {
  Mat<T, C, R> out{};
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) out(j, i) = std::conj(x(i, j));
  return out;
}

template <class T>
constexpr T det(const Mat<T, 2, 2>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

template <class T, std::size_t R, std::size_t C>
double max_abs(const Mat<T, R, C>& m) {
  double out = 0.0;
  for (const auto& v : m.a) out = std::max(out, static_cast<double>(std::abs(v)));
  return out;
}

template <class T, std::size_t R, std::size_t C>
double frobenius_norm(const Mat<T, R, C>& m) {
  double s = 0.0;
  for (const auto& v : m.a) s += std::norm(v);
  return std::sqrt(s);
}

// Spectral (operator 2-) norm of a 2x2 complex matrix, closed form from the
// eigenvalues of M*M.
inline double spectral_norm(const CMat2& m) {
  const CMat2 g = adjoint(m) * m;
  const double tr = std::real(g(0, 0) + g(1, 1));
  const double dt = std::real(det(g));
  const double disc = std::max(0.0, tr * tr / 4.0 - dt);
  return std::sqrt(std::max(0.0, tr / 2.0 + std::sqrt(disc)));
}

// Inner product <x, y> = sum_i x_i * conj(y_i).
template <std::size_t N>
cplx inner(const Vec<cplx, N>& x, const Vec<cplx, N>& y) {
  cplx s{};
  for (std::size_t i = 0; i < N; ++i) s += x[i] * std::conj(y[i]);
  return s;
}

template <std::size_t N>
double norm(const Vec<cplx, N>& x) {
  return std::sqrt(std::real(inner(x, x)));
}

template <class T, std::size_t R, std::size_t C>
bool approx_equal(const Mat<T, R, C>& x, const Mat<T, R, C>& y, double tol) {
  return max_abs(x - y) <= tol;
}

// 2x2 block view of a 4x4 matrix; (bi, bj) in {0,1}^2.
template <class T>
constexpr Mat<T, 2, 2> block(const Mat<T, 4, 4>& m, std::size_t bi, std::size_t bj) {
  Mat<T, 2, 2> out{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out(i, j) = m(2 * bi + i, 2 * bj + j);
  return out;
}

template <class T>
constexpr Mat<T, 4, 4> from_blocks(const Mat<T, 2, 2>& b00, const Mat<T, 2, 2>& b01,
                                   const Mat<T, 2, 2>& b10, const Mat<T, 2, 2>& b11) {
  Mat<T, 4, 4> out{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      out(i, j) = b00(i, j);
      out(i, j + 2) = b01(i, j);
      out(i + 2, j) = b10(i, j);
      out(i + 2, j + 2) = b11(i, j);
    }
  return out;
}

// u = (u1, u2) in C^2 (+) C^2
template <class T>
constexpr std::pair<Vec<T, 2>, Vec<T, 2>> split(const Vec<T, 4>& u) {
  return {Vec<T, 2>{{u[0], u[1]}}, Vec<T, 2>{{u[2], u[3]}}};
}

template <class T>
constexpr Vec<T, 4> join(const Vec<T, 2>& upper, const Vec<T, 2>& lower) {
  return Vec<T, 4>{{upper[0], upper[1], lower[0], lower[1]}};
}

template <class T, std::size_t R, std::size_t C>
std::ostream& operator<<(std::ostream& os, const Mat<T, R, C>& m) {
  os << '[';
  for (std::size_t i = 0; i < R; ++i) {
    os << (i ? ", [" : "[");
    for (std::size_t j = 0; j < C; ++j) os << (j ? ", " : "") << m(i, j);
    os << ']';
  }
  return os << ']';
}

template <class T>
constexpr Mat<std::complex<double>, 2, 2> to_double(const Mat<std::complex<T>, 2, 2>& m) {
  Mat<std::complex<double>, 2, 2> out{};
  for (std::size_t k = 0; k < 4; ++k)
    out.a[k] = {static_cast<double>(m.a[k].real()), static_cast<double>(m.a[k].imag())};
  return out;
}

}  // namespace diracbvp
