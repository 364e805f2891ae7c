#include <random>

#include "catch_amalgamated.hpp"
#include "diracbvp/oracle.hpp"

using namespace diracbvp;
using clifford::dirac_alpha;
using clifford::pauli;
using Catch::Matchers::WithinAbs;

namespace {

const HalflineGrid kStd{40.0, 4096, Scheme::StaggeredFD};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("rotated unknowns turn the symbol into the staggered block form") {
  // T maps (v1, v2) to (p, q); on e^{ikz} the operator has symbol alpha'.xi' - k alpha_3 + alpha_0 m
  const CMat2 is3 = pauli(3) * I_unit;
  const CMat2 i2 = CMat2::identity();
  const cplx r = 1.0 / std::sqrt(2.0);
  const CMat4 T = from_blocks(i2 * r, is3 * r, i2 * r, is3 * (-r));
  CHECK(approx_equal(T * adjoint(T), CMat4::identity(), 1e-15));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x1 = u(rng), x2 = u(rng), m = u(rng), k = u(rng);
    const CMat4 sym = dirac_alpha(1) * cplx(x1) + dirac_alpha(2) * cplx(x2) - dirac_alpha(3) * cplx(k) +
                      dirac_alpha(0) * cplx(m);
    const CMat2 K = is3 * (pauli(1) * cplx(x1) + pauli(2) * cplx(x2));
    const CMat4 expected = from_blocks(K, i2 * cplx(m, -k), i2 * cplx(m, k), -K);
    CHECK(approx_equal(T * sym * adjoint(T), expected, 1e-13));
    // a phase on the second component makes K real: |xi'| sigma_1
    const cplx s{x1, x2};
    CMat2 D = i2;
    D(1, 1) = -I_unit * s / std::abs(s);
    CHECK(approx_equal(adjoint(D) * K * D, pauli(1) * cplx(std::abs(s)), 1e-13));
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(HalflineGrid({40.0, 32}).validate(), InvalidArgument);
  CHECK_THROWS_AS(HalflineGrid({0.0, 128}).validate(), InvalidArgument);
  CHECK(HalflineGrid({40.0, 4096}).h() == 40.0 / 4096);
}

TEST_CASE("staggered FD eigenvalues") {
  SECTION("xi' = (1, 0), m = -1") {
    const auto ev = fd_eigenvalues({1, 0, -1}, kStd, {-1.41, 1.41});
    REQUIRE(ev.size() == 2);
    CHECK_THAT(ev[0], WithinAbs(-1.0, 1e-3));
    CHECK_THAT(ev[1], WithinAbs(1.0, 1e-3));
  }
  SECTION("xi' = 0, m = 1 has no bound states") { CHECK(fd_eigenvalues({0, 0, 1}, kStd, {-0.99, 0.99}).empty()); }
  SECTION("xi' = 0, m = -1 has a double eigenvalue at 0") {
    const auto ev = fd_eigenvalues({0, 0, -1}, kStd, {-0.99, 0.99});
    REQUIRE(ev.size() == 2);
    for (double e : ev) CHECK_THAT(e, WithinAbs(0.0, 1e-3));
  }
  SECTION("window must lie in the gap") {
    CHECK_THROWS_AS(fd_eigenvalues({1, 0, -1}, kStd, {-2.0, 1.0}), WindowOutsideGap);
    CHECK_THROWS_AS(fd_eigenvalues({1, 0, -1}, kStd, {0.5, 0.2}), WindowOutsideGap);
  }
}

TEST_CASE("no spurious in-gap eigenvalues for m >= 0") {
  for (const double m : {0.0, 0.25, 1.0, 3.0})
    for (const auto& xi : std::vector<std::array<double, 2>>{{0, 0}, {1, 0}, {3, 4}, {0.2, -0.7}}) {
      const ModelProblem p{xi[0], xi[1], m};
      if (p.threshold() == 0.0) continue;
      for (int n : {256, 1024})
        CHECK(fd_eigenvalues(p, {40.0, n}, default_window(p)).empty());
    }
}

TEST_CASE("in-gap FD eigenvalues for m < 0 are exactly the two branches") {
  for (const double m : {-0.5, -1.0, -2.0})
    for (const auto& xi : std::vector<std::array<double, 2>>{{0.3, 0}, {1, 1}, {3, 4}}) {
      const ModelProblem p{xi[0], xi[1], m};
      const auto ev = fd_eigenvalues(p, {40.0, 1024}, default_window(p));
      REQUIRE(ev.size() == 2);
      CHECK_THAT(ev[0], WithinAbs(-p.xi_norm(), 1e-10));
      CHECK_THAT(ev[1], WithinAbs(p.xi_norm(), 1e-10));
    }
}

TEST_CASE("eigenvector decay rate converges at order >= 0.9") {
  for (const ModelProblem p : {ModelProblem{1, 0, -1}, ModelProblem{3, 4, -1}, ModelProblem{0, 0, -1},
                               ModelProblem{0.5, 0.5, -2}}) {
    std::vector<double> lh, le;
    for (int n : {512, 1024, 2048, 4096}) {
      const HalflineGrid g{40.0, n};
      const auto ev = fd_eigenvalues(p, g, default_window(p));
      REQUIRE_FALSE(ev.empty());
      const double rho = std::abs(p.m);
      const double err = std::abs(fd_decay_rate(p, g, ev.back(), rho).rate - rho);
      lh.push_back(std::log(g.h()));
      le.push_back(std::log(err));
    }
    CHECK(slope(lh, le) >= 0.9);
  }
}

TEST_CASE("truncation robustness: Z = 40 -> 80 at fixed h") {
  for (const ModelProblem p : {ModelProblem{1, 0, -1}, ModelProblem{0.4, 0.3, -0.5}}) {
    const auto a = fd_eigenvalues(p, {40.0, 2048}, default_window(p));
    const auto b = fd_eigenvalues(p, {80.0, 4096}, default_window(p));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-6);
  }
}

TEST_CASE("shooting determinant") {
  CHECK(shooting_det({3, 4, -5}, 5.0, kStd) <= 1e-8);
  CHECK(shooting_det({1, 0, 1}, 0.0, kStd) >= 0.1);
  const double at = shooting_det({3, 4, -5}, 5.0, kStd);
  CHECK(at < shooting_det({3, 4, -5}, 4.999, kStd));
  CHECK(at < shooting_det({3, 4, -5}, 5.001, kStd));
  CHECK_THROWS_AS(shooting_det({1, 0, 1}, 1.5, kStd), OutsideGap);
  // the normalised value for m > 0 is 2 rho (rho + m) / |det [h1 h2]^* [h1 h2]|^{1/2}
  const double r2 = std::sqrt(2.0);
  CHECK_THAT(shooting_det({1, 0, 1}, 0.0, kStd), WithinAbs(2 * r2 * (r2 + 1) / 4.0, 1e-10));
}

TEST_CASE("shooting determinant is continuous across the gap") {
  const ModelProblem p{1, 0.5, -0.8};
  const HalflineGrid g{20.0, 256};
  const auto w = default_window(p, 1e-2);
  double prev = shooting_det(p, w.lo, g);
  for (int k = 1; k <= 400; ++k) {
    const double lam = w.lo + (w.hi - w.lo) * k / 400.0;
    const double cur = shooting_det(p, lam, g);
    CHECK(std::abs(cur - prev) <= 0.05);
    prev = cur;
  }
}

TEST_CASE("shooting roots match the closed form") {
  const ModelProblem p{3, 4, -1};
  const auto roots = shooting_roots(p, {40.0, 256}, default_window(p));
  REQUIRE(roots.size() == 2);
  CHECK_THAT(roots[0], WithinAbs(-5.0, 1e-6));
  CHECK_THAT(roots[1], WithinAbs(5.0, 1e-6));
  CHECK(shooting_roots({1, 0, 1}, {40.0, 256}, default_window({1, 0, 1})).empty());
}

TEST_CASE("hausdorff distance") {
  CHECK(hausdorff({}, {}) == 0.0);
  CHECK(hausdorff({1.0}, {}) == kInf);
  CHECK(hausdorff({-1.0, 1.0}, {1.0}) == 2.0);
  CHECK(hausdorff({0.0, 0.0}, {0.0}) == 0.0);
}

TEST_CASE("convergence flag and order helpers") {
  CHECK(convergence_suspect({1.0}, {1.1}, 5e-3));
  CHECK_FALSE(convergence_suspect({1.0}, {1.04}, 5e-3));
  CHECK(convergence_suspect({1.0}, {}, 5e-3));
  CHECK_FALSE(observed_order(1e-16, 1e-17));
  CHECK_THAT(*observed_order(4e-6, 1e-6), WithinAbs(2.0, 1e-12));
}

TEST_CASE("compare reports") {
  SECTION("xi' = (1, 0), m = -1") {
    const auto r = compare({1, 0, -1}, kStd, 5e-3);
    CHECK(r.pass);
    CHECK(r.closed_form == std::vector<double>{-1, 1});
    CHECK(r.matched.size() == 2);
    for (const auto& mm : r.matched) {
      CHECK(mm.fd);
      CHECK(mm.shooting);
      CHECK(mm.fd_deviation <= 5e-3);
      CHECK(mm.shooting_deviation <= 5e-3);
    }
    CHECK(r.unmatched_fd.empty());
    CHECK(r.unmatched_shooting.empty());
    CHECK_FALSE(r.convergence_suspect);
    REQUIRE(r.convergence_order);
    CHECK(*r.convergence_order >= 0.9);
  }
  SECTION("xi' = (2, 0), m = 3: both sets empty") {
    const auto r = compare({2, 0, 3}, {40.0, 1024}, 5e-3);
    CHECK(r.pass);
    CHECK(r.closed_form.empty());
    CHECK(r.fd.empty());
    CHECK(r.shooting.empty());
    CHECK_FALSE(r.convergence_order);
  }
  SECTION("coarse grid: eigenvalues are grid independent, so doubling N moves nothing") {
    const auto r = compare({1, 0, -1}, {40.0, 64}, 5e-3);
    CHECK(r.pass);
    CHECK(r.eigenvalue_shift_on_doubling <= 1e-10);
    CHECK_FALSE(r.convergence_suspect);
    REQUIRE(r.decay_rate_error);
    CHECK(*r.decay_rate_error > *r.decay_rate_error_doubled);
  }
}
