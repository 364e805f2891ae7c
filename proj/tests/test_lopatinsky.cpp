#include <random>

#include "catch_amalgamated.hpp"
#include "diracbvp/lopatinsky.hpp"

using namespace diracbvp;
using clifford::dirac_alpha;
using clifford::pauli;
using Catch::Matchers::WithinAbs;

namespace {

CMat2 m2(cplx a, cplx b, cplx c, cplx d) {
  CMat2 m{};
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

ParamCovector random_sphere_point(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const double x = n(rng), y = n(rng), z = n(rng);
  const double r = std::sqrt(x * x + y * y + z * z);
  return {x / r, y / r, z / r};
}

// alpha'.xi' - i rho alpha_3 - i mu
CMat4 boundary_symbol(const ParamCovector& pc) {
  return dirac_alpha(1) * cplx(pc.xi1) + dirac_alpha(2) * cplx(pc.xi2) - dirac_alpha(3) * (I_unit * pc.rho()) -
         CMat4::identity() * (I_unit * pc.mu);
}

const SurfacePoint kNorth{0, {0, 0, 1}, BoundaryPointFrame::from_normal({0, 0, 1})};

}  // namespace

TEST_CASE("lambda and theta matrices") {
  CHECK(approx_equal(lambda_matrix({1, 0, 0}), m2(-I_unit, 1, 1, I_unit), 0.0));
  CHECK(approx_equal(lambda_matrix({0, 0, 1}), m2(-I_unit, 0, 0, I_unit), 0.0));
  CHECK_THAT(std::abs(det(lambda_matrix({0, 1, 0}))), WithinAbs(0.0, 1e-15));
  const CMat4 th = theta_matrix({0, 0, 1});
  CHECK(approx_equal(block(th, 0, 0), CMat2::identity() * I_unit, 0.0));
  CHECK(approx_equal(block(th, 0, 1), pauli(3) * (-I_unit), 0.0));
  CHECK(approx_equal(block(th, 1, 0), pauli(3) * (-I_unit), 0.0));
}

TEST_CASE("h vectors") {
  const auto [h1, h2] = h_vectors({1, 0, 0});
  CHECK(approx_equal(h1, CVec4{{0, 0, -I_unit, 1}}, 0.0));
  CHECK(approx_equal(h2, CVec4{{1, I_unit, 0, 0}}, 0.0));
  std::mt19937_64 rng(17);
  for (int k = 0; k < 1000; ++k) {
    const auto pc = random_sphere_point(rng);
    const auto [a, b] = h_vectors(pc);
    CHECK(std::abs(inner(a, b)) <= 1e-12);
    CHECK(norm(CVec4(boundary_symbol(pc) * a)) <= 1e-12);
    CHECK(norm(CVec4(boundary_symbol(pc) * b)) <= 1e-12);
    CHECK(max_abs(boundary_symbol(pc) * theta_matrix(pc)) <= 1e-12);
  }
}

TEST_CASE("LS matrix examples") {
  const ParamCovector pc{0, 0, 1};
  const CMat2 l = ls_matrix(mit_condition(1.0), kNorth, pc);
  CHECK(approx_equal(l, m2(cplx(1, 1), 0, 0, cplx(1, 1)), 1e-15));
  CHECK(std::abs(det(l) - cplx(0, 2)) <= 1e-15);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto q = random_sphere_point(rng);
    const CMat2 l0 = ls_matrix(mit_condition(0.0), kNorth, q);
    CHECK(std::abs(det(l0) - cplx(-q.mu * q.rho())) <= 1e-14);
    const auto [h1, h2] = h_vectors(q);
    const CMat2 lg = ls_matrix(CoefficientPair{CMat2::identity(), CMat2{}}, q);
    CHECK(lg(0, 0) == h1[0]);
    CHECK(lg(1, 0) == h1[1]);
    CHECK(lg(0, 1) == h2[0]);
    CHECK(lg(1, 1) == h2[1]);
  }
}

TEST_CASE("closed-form MIT determinant") {
  CHECK(std::abs(mit_det_closed_form(1.0, {0.6, 0, 0.8}) - cplx(0, 2)) <= 1e-15);
  CHECK(mit_det_closed_form(0.0, {0, 0, 1}) == cplx(-1.0, 0.0));
  CHECK(mit_det_closed_form(2.0, {1, 0, 0}) == cplx(0.0, 4.0));
}

TEST_CASE("numeric LS determinant matches the closed form on random samples") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> ua(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = ua(rng);
    const auto pc = random_sphere_point(rng);
    worst = std::max(worst, std::abs(det(ls_matrix(mit_condition(a), kNorth, pc)) - mit_det_closed_form(a, pc)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("LS determinant is homogeneous of degree two") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  const CoefficientPair c = BoundaryCondition::behrndt(BoundaryFunction::constant(2.5)).local(kNorth);
  for (int k = 0; k < 200; ++k) {
    const auto pc = random_sphere_point(rng);
    const double t = ut(rng);
    const cplx d1 = det(ls_matrix(c, pc));
    const cplx dt = det(ls_matrix(c, {t * pc.xi1, t * pc.xi2, t * pc.mu}));
    CHECK(std::abs(dt - t * t * d1) <= 1e-12 * t * t * std::max(1.0, std::abs(d1)));
  }
}

TEST_CASE("grids") {
  for (const auto& g : sphere_grid(2048)) CHECK_THAT(g.rho(), WithinAbs(1.0, 1e-12));
  const auto c = circle_grid(720);
  CHECK(c.size() == 720);
  for (const auto& g : c) {
    CHECK(g.mu == 0.0);
    CHECK_THAT(g.rho(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("certification of MIT conditions") {
  const auto s = SurfaceSampler::sphere(1.0);
  SECTION("a = 1, parameter mode") {
    const auto c = certify_ls(mit_condition(1.0), s);
    CHECK(c.certified);
    CHECK_THAT(c.inf_estimate, WithinAbs(2.0, 1e-9));
    CHECK(c.n_sphere == 2048);
    CHECK(c.n_boundary == 512);
    CHECK(c.mode == LSMode::Parameter);
  }
  SECTION("a = 1, standard mode") {
    LSOptions o;
    o.mode = LSMode::Standard;
    const auto c = certify_ls(mit_condition(1.0), s, o);
    CHECK(c.certified);
    CHECK(c.n_sphere == 720);
    CHECK_THAT(c.inf_estimate, WithinAbs(2.0, 1e-9));
  }
  SECTION("a = 0 fails with a witness near mu = 0") {
    const auto c = certify_ls(mit_condition(0.0), s);
    CHECK_FALSE(c.certified);
    CHECK(c.inf_estimate <= 1e-9);
    CHECK(std::abs(c.witness.mu) <= c.grid_spacing);
    // witness reproduces by re-evaluation
    const auto& p = s.points[static_cast<std::size_t>(c.witness_point)];
    CHECK_THAT(std::abs(det(ls_matrix(mit_condition(0.0), p, c.witness))), WithinAbs(c.inf_estimate, 1e-12));
  }
  SECTION("polishing is what exposes the measure-zero zero set") {
    LSOptions o;
    o.polish = false;
    const auto c = certify_ls(mit_condition(0.0), s, o);
    CHECK(c.grid_min > 0.0);
    CHECK(c.inf_estimate == c.grid_min);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(certify_ls(mit_condition(1.0), SurfaceSampler{"points", {}}), EmptySampler);
    LSOptions o;
    o.n_sphere = 4;
    CHECK_THROWS_AS(certify_ls(mit_condition(1.0), s, o), InvalidArgument);
  }
}

TEST_CASE("thread count does not change the certificate") {
  const auto s = SurfaceSampler::cone(0.8, 97);
  const auto a = BoundaryFunction::callable([](const Vec3& x) { return 0.3 + std::sin(x[0]); });
  LSOptions o1, o4;
  o1.n_sphere = o4.n_sphere = 256;
  o4.threads = 4;
  const auto c1 = certify_ls(mit_condition(a), s, o1);
  const auto c4 = certify_ls(mit_condition(a), s, o4);
  CHECK(c1.inf_estimate == c4.inf_estimate);
  CHECK(c1.grid_min == c4.grid_min);
  CHECK(c1.witness_point == c4.witness_point);
  CHECK(c1.witness.mu == c4.witness.mu);
}

TEST_CASE("refining nested grids never increases the sampled minimum") {
  const auto s = SurfaceSampler::sphere(1.0, 32);
  const auto a = BoundaryFunction::callable([](const Vec3& x) { return 0.5 + x[2]; });
  LSOptions o;
  o.mode = LSMode::Standard;
  o.polish = false;
  double prev = kInf;
  for (std::size_t n : {16u, 32u, 64u, 128u, 256u}) {
    o.n_sphere = n;
    const auto c = certify_ls(mit_condition(a), s, o);
    CHECK(c.grid_min <= prev);
    prev = c.grid_min;
  }
}

TEST_CASE("uniform infimum is the minimum of the local infima on a compact sampler") {
  const auto s = SurfaceSampler::sphere(1.0, 64);
  const auto a = BoundaryFunction::callable([](const Vec3& x) { return 1.5 + x[0]; });
  LSOptions o;
  o.n_sphere = 512;
  o.polish = false;
  const auto c = certify_ls(mit_condition(a), s, o);
  const auto loc = local_ls_infima(mit_condition(a), s, LSMode::Parameter, 512);
  CHECK(*std::min_element(loc.begin(), loc.end()) == c.grid_min);
}

TEST_CASE("grid visitor order is point-major") {
  const auto s = SurfaceSampler::sphere(1.0, 3);
  std::vector<std::pair<int, std::size_t>> seen;
  for_each_ls_node(mit_condition(1.0), s, LSMode::Parameter, 8,
                   [&](const SurfacePoint& p, std::size_t k, const ParamCovector&, cplx d) {
                     seen.emplace_back(p.id, k);
                     CHECK_THAT(std::abs(d), WithinAbs(2.0, 1e-14));
                   });
  REQUIRE(seen.size() == 24);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    CHECK(seen[i].first == static_cast<int>(i / 8));
    CHECK(seen[i].second == i % 8);
  }
}
