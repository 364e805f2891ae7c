#pragma once

// Boundary samples with local frames, boundary-condition coefficient pairs
// (b1, b2), the MIT and Behrndt families, and the symmetry test
// b^*(sigma.nu) + (sigma.nu) b = 0 for the normalized form (I2, b).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "clifford.hpp"
#include "errors.hpp"
#include "matrix.hpp"

namespace diracbvp {

inline double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }
inline Vec3 cross(const Vec3& x, const Vec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}
inline double norm(const Vec3& x) { return std::sqrt(dot(x, x)); }
inline Vec3 scaled(const Vec3& x, double s) { return {x[0] * s, x[1] * s, x[2] * s}; }
inline Vec3 normalized(const Vec3& x) { return scaled(x, 1.0 / norm(x)); }

/// Orthonormal right-handed triad (t1, t2, n) at a boundary point. The
/// normal is the direction that becomes the local z-axis, i.e. the inward
/// normal of the domain.
struct BoundaryPointFrame {
  Vec3 normal{0, 0, 1};
  Vec3 tangent1{1, 0, 0};
  Vec3 tangent2{0, 1, 0};

  static BoundaryPointFrame from_normal(const Vec3& n_in) {
    const double len = norm(n_in);
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidArgument("frame: normal must be a nonzero finite vector");
    const Vec3 n = scaled(n_in, 1.0 / len);
    // helper axis least aligned with n
    int k = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(n[j]) < std::abs(n[k])) k = j;
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    const Vec3 t1 = normalized(cross(e, n));
    const Vec3 t2 = cross(n, t1);
    return {n, t1, t2};
  }

  /// Largest violation of orthonormality / right-handedness.
  double defect() const {
    double d = 0.0;
    d = std::max(d, std::abs(norm(normal) - 1.0));
    d = std::max(d, std::abs(norm(tangent1) - 1.0));
    d = std::max(d, std::abs(norm(tangent2) - 1.0));
    d = std::max(d, std::abs(dot(normal, tangent1)));
    d = std::max(d, std::abs(dot(normal, tangent2)));
    d = std::max(d, std::abs(dot(tangent1, tangent2)));
    const Vec3 c = cross(tangent1, tangent2);
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(c[j] - normal[j]));
    return d;
  }

  bool valid(double tol = 1e-12) const { return defect() <= tol; }

  /// Ambient -> local coordinates: rows (t1, t2, n).
  Vec3 to_local(const Vec3& v) const { return {dot(tangent1, v), dot(tangent2, v), dot(normal, v)}; }
  Vec3 to_ambient(const Vec3& w) const {
    Vec3 out{};
    for (int j = 0; j < 3; ++j) out[j] = w[0] * tangent1[j] + w[1] * tangent2[j] + w[2] * normal[j];
    return out;
  }
};

/// SU(2) element U with U (sigma.v) U^* = sigma.(R v), R the ambient->local
/// rotation of the frame. Spinor blocks transform as u^k -> U u^k.
inline CMat2 spin_rotation(const BoundaryPointFrame& f) {
  const double r[3][3] = {{f.tangent1[0], f.tangent1[1], f.tangent1[2]},
                          {f.tangent2[0], f.tangent2[1], f.tangent2[2]},
                          {f.normal[0], f.normal[1], f.normal[2]}};
  // rotation matrix -> unit quaternion (w, x, y, z)
  double w, x, y, z;
  const double tr = r[0][0] + r[1][1] + r[2][2];
  if (tr > 0.0) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    w = 0.25 * s;
    x = (r[2][1] - r[1][2]) / s;
    y = (r[0][2] - r[2][0]) / s;
    z = (r[1][0] - r[0][1]) / s;
  } else if (r[0][0] > r[1][1] && r[0][0] > r[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]);
    w = (r[2][1] - r[1][2]) / s;
    x = 0.25 * s;
    y = (r[0][1] + r[1][0]) / s;
    z = (r[0][2] + r[2][0]) / s;
  } else if (r[1][1] > r[2][2]) {
    const double s = 2.0 * std::sqrt(1.0 + r[1][1] - r[0][0] - r[2][2]);
    w = (r[0][2] - r[2][0]) / s;
    x = (r[0][1] + r[1][0]) / s;
    y = 0.25 * s;
    z = (r[1][2] + r[2][1]) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r[2][2] - r[0][0] - r[1][1]);
    w = (r[1][0] - r[0][1]) / s;
    x = (r[0][2] + r[2][0]) / s;
    y = (r[1][2] + r[2][1]) / s;
    z = 0.25 * s;
  }
  return CMat2::identity() * cplx(w) - I_unit * sigma_dot(Vec3{x, y, z});
}

struct SurfacePoint {
  int id = 0;
  Vec3 position{};
  BoundaryPointFrame frame{};
};

/// Finite set of boundary samples standing in for the boundary surface.
struct SurfaceSampler {
  std::string tag;
  std::vector<SurfacePoint> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }

  void validate() const {
    if (points.empty()) throw EmptySampler("sampler '" + tag + "' has no points");
    for (const auto& p : points)
      if (!p.frame.valid())
        throw InvalidArgument("sampler '" + tag + "': frame at point " + std::to_string(p.id) +
                              " is not a right-handed orthonormal triad");
  }

  /// Sphere |x| = R bounding the exterior domain |x| > R; Fibonacci lattice.
  static SurfaceSampler sphere(double radius, std::size_t n = 512) {
    SurfaceSampler s{"exterior-ball", {}};
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < n; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / static_cast<double>(n);
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(k);
      const Vec3 dir{rr * std::cos(phi), rr * std::sin(phi), z};
      s.points.push_back({static_cast<int>(k), scaled(dir, radius), BoundaryPointFrame::from_normal(dir)});
    }
    return s;
  }

  /// Plane z = 0 bounding the half-space z > 0; square lattice on [-L, L]^2.
  static SurfaceSampler plane(std::size_t n = 256, double extent = 10.0) {
    SurfaceSampler s{"half-space", {}};
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const BoundaryPointFrame f{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    for (std::size_t k = 0; k < n; ++k) {
      const double u = side > 1 ? -extent + 2.0 * extent * static_cast<double>(k % side) / (side - 1) : 0.0;
      const double v = side > 1 ? -extent + 2.0 * extent * static_cast<double>(k / side) / (side - 1) : 0.0;
      s.points.push_back({static_cast<int>(k), {u, v, 0.0}, f});
    }
    return s;
  }

  /// Lateral surface of the cone {angle(x, e3) < half_angle}, radii
  /// log-spaced in [r_min, r_max]. The normal points into the cone.
  static SurfaceSampler cone(double half_angle, std::size_t n = 512, double r_min = 1.0, double r_max = 1e3) {
    if (!(half_angle > 0.0 && half_angle < std::numbers::pi))
      throw InvalidArgument("cone: half-angle must lie in (0, pi)");
    SurfaceSampler s{"cone", {}};
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double c = std::cos(half_angle), sn = std::sin(half_angle);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = n > 1 ? static_cast<double>(k) / (n - 1) : 0.0;
      const double r = r_min * std::pow(r_max / r_min, t);
      const double phi = golden * static_cast<double>(k);
      const Vec3 pos{r * sn * std::cos(phi), r * sn * std::sin(phi), r * c};
      const Vec3 e_theta{c * std::cos(phi), c * std::sin(phi), -sn};
      s.points.push_back({static_cast<int>(k), pos, BoundaryPointFrame::from_normal(scaled(e_theta, -1.0))});
    }
    return s;
  }
};

/// Real function on the boundary: constant, nearest-sample table, or callable.
class BoundaryFunction {
 public:
  enum class Kind { Const, Table, Callable };

  static BoundaryFunction constant(double v) {
    BoundaryFunction f;
    f.kind_ = Kind::Const;
    f.value_ = v;
    return f;
  }

  static BoundaryFunction table(std::vector<Vec3> points, std::vector<double> values) {
    if (points.empty() || points.size() != values.size())
      throw InvalidArgument("table: points and values must be nonempty and of equal length");
    BoundaryFunction f;
    f.kind_ = Kind::Table;
    f.points_ = std::move(points);
    f.values_ = std::move(values);
    return f;
  }

  static BoundaryFunction callable(std::function<double(const Vec3&)> fn) {
    BoundaryFunction f;
    f.kind_ = Kind::Callable;
    f.fn_ = std::move(fn);
    return f;
  }

  Kind kind() const { return kind_; }
  double const_value() const { return value_; }
  const std::vector<Vec3>& table_points() const { return points_; }
  const std::vector<double>& table_values() const { return values_; }

  double operator()(const Vec3& x) const {
    switch (kind_) {
      case Kind::Const:
        return value_;
      case Kind::Table: {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < points_.size(); ++k) {
          const Vec3 d{x[0] - points_[k][0], x[1] - points_[k][1], x[2] - points_[k][2]};
          const double dd = dot(d, d);
          if (dd < bd) {  // first index wins ties
            bd = dd;
            best = k;
          }
        }
        return values_[best];
      }
      case Kind::Callable:
        return fn_(x);
    }
    return 0.0;
  }

  /// Pointwise image under g, preserving the representation where possible.
  BoundaryFunction map(const std::function<double(double)>& g) const {
    switch (kind_) {
      case Kind::Const:
        return constant(g(value_));
      case Kind::Table: {
        std::vector<double> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), g);
        return table(points_, std::move(v));
      }
      case Kind::Callable: {
        auto fn = fn_;
        return callable([fn, g](const Vec3& x) { return g(fn(x)); });
      }
    }
    return *this;
  }

 private:
  Kind kind_ = Kind::Const;
  double value_ = 0.0;
  std::vector<Vec3> points_;
  std::vector<double> values_;
  std::function<double(const Vec3&)> fn_;
};

struct CoefficientPair {
  CMat2 b1;
  CMat2 b2;
};

/// Boundary operator b1 u^1 + b2 u^2 = 0.
class BoundaryCondition {
 public:
  enum class Family { MIT, Behrndt, Generic };

  using GenericFn = std::function<CoefficientPair(const SurfacePoint&)>;

  static BoundaryCondition mit(BoundaryFunction a) {
    BoundaryCondition bc;
    bc.family_ = Family::MIT;
    bc.coef_ = std::move(a);
    return bc;
  }

  static BoundaryCondition behrndt(BoundaryFunction theta) {
    BoundaryCondition bc;
    bc.family_ = Family::Behrndt;
    bc.coef_ = std::move(theta);
    return bc;
  }

  /// Constant coefficients given in the local frame of every point.
  static BoundaryCondition generic(const CMat2& b1, const CMat2& b2) {
    return generic([b1, b2](const SurfacePoint&) { return CoefficientPair{b1, b2}; });
  }

  static BoundaryCondition generic(GenericFn fn) {
    BoundaryCondition bc;
    bc.family_ = Family::Generic;
    bc.generic_ = std::move(fn);
    return bc;
  }

  Family family() const { return family_; }
  /// a for MIT, theta for Behrndt.
  const BoundaryFunction& coefficient() const { return coef_; }

  /// (b1, b2) in the local frame at p, where the frame normal is e3.
  CoefficientPair local(const SurfacePoint& p) const {
    const CMat2 s3 = clifford::pauli(3);
    switch (family_) {
      case Family::MIT: {
        const double a = coef_(p.position);
        return {CMat2::identity(), s3 * (I_unit * a)};
      }
      case Family::Behrndt: {
        // first row of the Behrndt system: (theta-1) u^1 + (theta+1) i (sigma.nu) u^2 = 0
        const double th = coef_(p.position);
        return {CMat2::identity() * cplx(th - 1.0), s3 * (I_unit * (th + 1.0))};
      }
      case Family::Generic:
        return generic_(p);
    }
    return {};
  }

  /// (b1, b2) in ambient coordinates.
  CoefficientPair ambient(const SurfacePoint& p) const {
    const CMat2 sn = sigma_dot(p.frame.normal);
    switch (family_) {
      case Family::MIT:
        return {CMat2::identity(), sn * (I_unit * coef_(p.position))};
      case Family::Behrndt: {
        const double th = coef_(p.position);
        return {CMat2::identity() * cplx(th - 1.0), sn * (I_unit * (th + 1.0))};
      }
      case Family::Generic: {
        const CMat2 u = spin_rotation(p.frame);
        const auto loc = generic_(p);
        return {adjoint(u) * loc.b1 * u, adjoint(u) * loc.b2 * u};
      }
    }
    return {};
  }

 private:
  Family family_ = Family::MIT;
  BoundaryFunction coef_ = BoundaryFunction::constant(1.0);
  GenericFn generic_;
};

inline BoundaryCondition mit_condition(BoundaryFunction a) { return BoundaryCondition::mit(std::move(a)); }
inline BoundaryCondition mit_condition(double a) { return BoundaryCondition::mit(BoundaryFunction::constant(a)); }

/// a = (theta + 1) / (theta - 1).
inline double behrndt_to_mit(double theta) {
  if (!(std::abs(theta - 1.0) > 0.0) || !std::isfinite(theta))
    throw DegenerateTheta("behrndt_to_mit: theta = 1 has no MIT equivalent");
  return (theta + 1.0) / (theta - 1.0);
}

/// Pointwise conversion; requires inf |theta - 1| > min_gap on the sample set.
inline BoundaryFunction behrndt_to_mit(const BoundaryFunction& theta, const SurfaceSampler& sampler,
                                       double min_gap = 1e-12) {
  sampler.validate();
  double inf_gap = std::numeric_limits<double>::infinity();
  int where = -1;
  for (const auto& p : sampler.points) {
    const double g = std::abs(theta(p.position) - 1.0);
    if (g < inf_gap) {
      inf_gap = g;
      where = p.id;
    }
  }
  if (!(inf_gap > min_gap))
    throw DegenerateTheta("behrndt_to_mit: inf |theta - 1| = " + std::to_string(inf_gap) + " at point " +
                          std::to_string(where));
  return theta.map([](double th) { return (th + 1.0) / (th - 1.0); });
}

struct SymmetryResult {
  bool pass = false;
  double max_residual = 0.0;
  int worst_point = -1;
  double tol = 1e-10;
};

/// b = b1^{-1} b2 in the local frame; throws NonNormalizable if b1 is singular.
inline CMat2 normalized_coefficient(const CoefficientPair& c, int point_id = -1) {
  const cplx d = det(c.b1);
  const double scale = std::max(1.0, max_abs(c.b1));
  if (!(std::abs(d) > 1e-14 * scale * scale))
    throw NonNormalizable("b1 is singular at point " + std::to_string(point_id));
  CMat2 inv{};
  inv(0, 0) = c.b1(1, 1) / d;
  inv(0, 1) = -c.b1(0, 1) / d;
  inv(1, 0) = -c.b1(1, 0) / d;
  inv(1, 1) = c.b1(0, 0) / d;
  return inv * c.b2;
}

/// max over samples of || b^*(sigma.nu) + (sigma.nu) b ||_2, evaluated in the
/// local frame where sigma.nu = sigma_3.
inline SymmetryResult check_symmetry_condition(const BoundaryCondition& bc, const SurfaceSampler& sampler,
                                               double tol = 1e-10) {
  sampler.validate();
  const CMat2 s3 = clifford::pauli(3);
  SymmetryResult r;
  r.tol = tol;
  for (const auto& p : sampler.points) {
    const CMat2 b = normalized_coefficient(bc.local(p), p.id);
    const double res = spectral_norm(adjoint(b) * s3 + s3 * b);
    if (r.worst_point < 0 || res > r.max_residual) {
      r.max_residual = res;
      r.worst_point = p.id;
    }
  }
  r.pass = r.max_residual <= tol;
  return r;
}

}  // namespace diracbvp
