#include <random>

#include "catch_amalgamated.hpp"
#include "diracbvp/spectrum.hpp"

using namespace diracbvp;
using Catch::Matchers::WithinAbs;

namespace {

SpectrumSet two(double l, double r) { return SpectrumSet::two_half_lines(l, r); }
const SpectrumSet kLine = SpectrumSet::full_line();

}  // namespace

TEST_CASE("free and constant-limit spectra") {
  CHECK(free_dirac_spectrum(1) == two(-1, 1));
  CHECK(free_dirac_spectrum(0) == kLine);
  CHECK(free_dirac_spectrum(-2) == two(-2, 2));
  CHECK(limit_constant_spectrum(0, 1) == two(-1, 1));
  CHECK(limit_constant_spectrum(3, 1) == two(2, 4));
  CHECK(limit_constant_spectrum(5, 0) == kLine);
  CHECK_THROWS_AS(limit_constant_spectrum(kInf, 1), InvalidArgument);
}

TEST_CASE("exterior and conic formulas on closed-form limits") {
  using E = AsymptoticEstimate;
  CHECK(essential_spectrum_exterior(E::from_limits(0.5, -0.5), 1) == two(-0.5, 0.5));
  CHECK(essential_spectrum_exterior(E::from_limits(0, 0), 1) == two(-1, 1));
  CHECK(essential_spectrum_exterior(E::from_limits(0.5, -0.5), 0.4) == kLine);
  CHECK(essential_spectrum_exterior(E::from_limits(0.5, -0.5), 0.5) == kLine);  // touching endpoints merge
  CHECK(essential_spectrum_conic_mit(E::from_limits(0, 0), 1) == two(-1, 1));
  CHECK(essential_spectrum_conic_mit(E::from_limits(0, 0), -1) == kLine);
  CHECK(essential_spectrum_conic_mit(E::from_limits(0.2, -0.2), 0) == kLine);
  CHECK_THROWS_AS(E::from_limits(-1, 1), InvalidArgument);
}

TEST_CASE("spectral gap") {
  using E = AsymptoticEstimate;
  const auto g = spectral_gap(E::from_limits(0.5, -0.5), 1);
  REQUIRE(g);
  CHECK(*g == OpenInterval{-0.5, 0.5});
  CHECK_FALSE(spectral_gap(E::from_limits(0, 0), 0));
  CHECK_FALSE(spectral_gap(E::from_limits(1, -1), 0.5));
}

TEST_CASE("union of spectrum sets") {
  CHECK(union_of({two(-1, 1), two(0, 2)}) == two(0, 1));
  CHECK(union_of({two(-1, 1), two(-1, 1)}) == two(-1, 1));
  std::vector<SpectrumSet> parts;
  for (int k = 0; k <= 100; ++k) parts.push_back(limit_constant_spectrum(-0.5 + k / 100.0, 1));
  const auto u = union_of(parts);
  REQUIRE(u.intervals().size() == 2);
  CHECK_THAT(u.intervals()[0].hi, WithinAbs(-0.5, 1e-15));
  CHECK_THAT(u.intervals()[1].lo, WithinAbs(0.5, 1e-15));
  // eigenvalues swallowed by intervals disappear
  const SpectrumSet s({{-kInf, -1}, {1, kInf}}, {0.0, 2.0, -3.0, 0.0});
  CHECK(s.eigenvalues() == std::vector<double>{0.0});
}

TEST_CASE("normalisation is idempotent and order independent") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> e(-20, 20);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interval> iv;
    std::vector<double> ev;
    const int n = 1 + trial % 6;
    for (int k = 0; k < n; ++k) {
      double a = e(rng) / 4.0, b = e(rng) / 4.0;
      if (a > b) std::swap(a, b);
      if (k == 0 && trial % 5 == 0) a = -kInf;
      if (k == 1 && trial % 7 == 0) b = kInf;
      iv.push_back({a, b});
      ev.push_back(e(rng) / 4.0);
    }
    const SpectrumSet s(iv, ev);
    SpectrumSet t = s;
    t.normalize();
    CHECK(t == s);
    std::shuffle(iv.begin(), iv.end(), rng);
    std::shuffle(ev.begin(), ev.end(), rng);
    CHECK(SpectrumSet(iv, ev) == s);
    for (std::size_t k = 1; k < s.intervals().size(); ++k) CHECK(s.intervals()[k - 1].hi < s.intervals()[k].lo);
    // membership agrees with the raw intervals
    for (int q = -25; q <= 25; ++q) {
      const double x = q / 4.0;
      bool raw = false;
      for (const auto& i : iv) raw = raw || i.contains(x);
      for (double v : ev) raw = raw || v == x;
      CHECK(s.contains(x) == raw);
    }
  }
}

TEST_CASE("sampled union of limit spectra reproduces the exterior formula") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const double m = u(rng);
    std::vector<SpectrumSet> parts;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
      // random interior samples plus nothing at the endpoints: error shrinks with density
      const double t = (k + std::uniform_real_distribution<double>(0.0, 1.0)(rng)) / n;
      parts.push_back(limit_constant_spectrum(a + t * (b - a), m));
    }
    const auto sampled = union_of(parts);
    const auto exact = essential_spectrum_exterior(AsymptoticEstimate::from_limits(b, a), m);
    REQUIRE(sampled.intervals().size() == exact.intervals().size());
    for (std::size_t k = 0; k < exact.intervals().size(); ++k) {
      const auto &x = sampled.intervals()[k], &y = exact.intervals()[k];
      if (std::isfinite(y.lo)) CHECK_THAT(x.lo, WithinAbs(y.lo, 1e-3));
      if (std::isfinite(y.hi)) CHECK_THAT(x.hi, WithinAbs(y.hi, 1e-3));
    }
  }
}

TEST_CASE("structural properties of the formulas") {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const auto est = AsymptoticEstimate::from_limits(b, a);
    const double m = u(rng);
    CHECK(essential_spectrum_conic_mit(est, m).includes(essential_spectrum_exterior(est, m)));
    CHECK(essential_spectrum_exterior(est, m) == essential_spectrum_exterior(est, -m));
    if (const auto g = spectral_gap(est, m)) {
      const auto ess = essential_spectrum_exterior(est, m);
      for (const auto& iv : ess.intervals()) {
        CHECK((iv.hi <= g->lo || iv.lo >= g->hi));
      }
      CHECK_FALSE(essential_spectrum_exterior(est, m).contains(0.5 * (g->lo + g->hi)));
    }
  }
}

TEST_CASE("asymptotic estimation") {
  SECTION("constant field") {
    PotentialField p;
    p.phi = Field3::constant(0.7);
    const auto e = estimate_asymptotics(p);
    CHECK(e.m_sup == 0.7);
    CHECK(e.m_inf == 0.7);
    CHECK(e.so1_residual == 0.0);
    CHECK(e.shells.size() == 6);
    CHECK(e.n_directions == 256);
  }
  SECTION("slowly oscillating field against a dense radial scan") {
    PotentialField p;
    p.phi = Field3::slowly_oscillating(0.0, 0.5, 1.0);
    const auto e = estimate_asymptotics(p);
    CHECK_THAT(e.m_sup, WithinAbs(0.5, 1e-2));
    CHECK_THAT(e.m_inf, WithinAbs(-0.5, 1e-2));
    CHECK(e.shells.back().grad_max <= 1e-3);
    CHECK(e.so1_residual <= 1e-3);
    CHECK(so1_warnings(e).empty());
    // the field is radial, so a dense 1-D scan over the same radial range is exact up to resolution
    double hi = -kInf, lo = kInf;
    const int n = 200000;
    for (int k = 0; k <= n; ++k) {
      const double r = 1e3 * std::pow(1e3, static_cast<double>(k) / n);
      const double v = 0.5 * std::sin(std::log1p(r));
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    CHECK_THAT(e.m_sup, WithinAbs(hi, 1e-3));
    CHECK_THAT(e.m_inf, WithinAbs(lo, 1e-3));
  }
  SECTION("radial table decaying like 1/(1+r)") {
    std::vector<double> r, v;
    for (int k = 0; k <= 60; ++k) {
      r.push_back(std::pow(10.0, 0.1 * k));
      v.push_back(1.0 / (1.0 + r.back()));
    }
    PotentialField p;
    p.phi = Field3::radial_table(r, v);
    const auto e = estimate_asymptotics(p);
    CHECK_THAT(e.m_sup, WithinAbs(0.0, 1e-3));
    CHECK_THAT(e.m_inf, WithinAbs(0.0, 1e-3));
    CHECK(e.m_inf <= e.m_sup);
  }
  SECTION("a rapidly oscillating field raises a warning") {
    PotentialField p;
    p.phi = Field3::callable([](const Vec3& x) { return std::sin(x[0]); });
    const auto e = estimate_asymptotics(p);
    CHECK(e.so1_residual > 1e-3);
    CHECK(so1_warnings(e).size() == 1);
  }
  SECTION("magnetic potential is checked but does not enter the limits") {
    PotentialField p;
    p.phi = Field3::constant(0.1);
    p.A[1] = Field3::slowly_oscillating(0, 2, 1);
    const auto e = estimate_asymptotics(p);
    CHECK(e.m_sup == 0.1);
    CHECK(e.a_so1_residual > 0.0);
    CHECK(e.a_so1_residual <= 1e-2);
  }
  SECTION("errors") {
    PotentialField p;
    AsymptoticsOptions o;
    o.schedule = {10, 100};
    CHECK_THROWS_AS(estimate_asymptotics(p, o), ScheduleTooShort);
    o.schedule = {10, 5, 100};
    CHECK_THROWS_AS(estimate_asymptotics(p, o), InvalidArgument);
    p.phi = Field3::constant(1.0, 0.5);
    CHECK_THROWS_AS(estimate_asymptotics(p), ComplexPotential);
  }
  SECTION("deterministic") {
    PotentialField p;
    p.phi = Field3::slowly_oscillating(0.2, 0.3, 2.0);
    const auto a = estimate_asymptotics(p), b = estimate_asymptotics(p);
    CHECK(a.m_sup == b.m_sup);
    CHECK(a.m_inf == b.m_inf);
    CHECK(a.so1_residual == b.so1_residual);
  }
}
