#include "kdiv/kmethod.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace kdiv;

namespace {

ConcavePL min_curve(double a, double b) {
  // min(a, b t)
  VecXd t(2), y(2);
  t << 0.0, a / b;
  y << 0.0, a;
  return {t, y, 0.0};
}

VecXd random_seq(std::mt19937_64& rng, std::size_t n) {
  const auto v = oracle::random_vector(rng, n);
  return Eigen::Map<const VecXd>(v.data(), static_cast<Eigen::Index>(n));
}

}  // namespace

TEST_CASE("parameter norm of simple curves") {
  const ConcavePL f = min_curve(1.0, 1.0);
  CHECK(parameter_norm(ConcavePL(), ParameterLattice::lq_dyadic(2.0, 0.5)).value == 0.0);
  CHECK(parameter_norm(f, ParameterLattice::lq_dyadic(kInf, 0.5)).value == doctest::Approx(1.0));
  // int (min(1,t) t^{-1/2})^2 dt/t = 2.
  const ParameterNorm fine = parameter_norm(f, ParameterLattice::lq_dyadic(2.0, 0.5, Grid{-30, 30, 16}));
  CHECK(std::pow(fine.value, 2.0) == doctest::Approx(2.0).epsilon(1e-3));
  const ParameterNorm coarse = parameter_norm(f, ParameterLattice::lq_dyadic(2.0, 0.5));
  CHECK(coarse.value == doctest::Approx(std::sqrt(2.0)).epsilon(5e-3));
  CHECK(coarse.quadrature_error > 0.0);
  CHECK_FALSE(coarse.divergent);
  CHECK_THROWS_AS(parameter_norm(f, ParameterLattice::lq_dyadic(0.0, 0.5)), ValidationError);
  CHECK_THROWS_AS(parameter_norm(VecXd::Ones(3), ParameterLattice::lq_dyadic(1.0, 0.5)),
                  ValidationError);
}

TEST_CASE("parameter norm flags divergence") {
  // K(t) = t against t^{-theta} with theta < 1 grows without bound.
  const ParameterNorm n = parameter_norm(ConcavePL::affine(0.0, 1e4), ParameterLattice::lq_dyadic(1.0, 0.0, Grid{-20, 40, 4}));
  CHECK(n.divergent);
  CHECK(std::isinf(n.value));
}

TEST_CASE("parameter norm is monotone, homogeneous, and intersections take the max") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const ParameterLattice e0 = ParameterLattice::lq_dyadic(1.5, 0.3);
  const ParameterLattice e1 = ParameterLattice::lq_dyadic(kInf, 0.6);
  const ParameterLattice both = ParameterLattice::intersection({e0, e1});
  for (int rep = 0; rep < 200; ++rep) {
    VecXd f(e0.grid.size());
    for (int i = 0; i < f.size(); ++i) f(i) = unif(rng);
    VecXd g = f;
    for (int i = 0; i < g.size(); ++i) g(i) += unif(rng) < 0.3 ? unif(rng) : 0.0;
    CHECK(parameter_norm(f, e0).value <= parameter_norm(g, e0).value);
    CHECK(parameter_norm(f, e1).value <= parameter_norm(g, e1).value);
    CHECK(parameter_norm(VecXd(2.5 * f), e0).value == doctest::Approx(2.5 * parameter_norm(f, e0).value));
    CHECK(parameter_norm(f, both).value ==
          std::max(parameter_norm(f, e0).value, parameter_norm(f, e1).value));
  }
}

TEST_CASE("Lions-Peetre norm") {
  const ConcavePL f = min_curve(1.0, 1.0);
  for (double theta : {0.2, 0.5, 0.8}) CHECK(lions_peetre_norm(f, theta, kInf) == doctest::Approx(1.0));
  // int_0^1 t^{r(1-theta)} dt/t + int_1^inf t^{-r theta} dt/t.
  const double theta = 0.4;
  const double r = 1.5;
  const double exact = std::pow(1.0 / (r * (1 - theta)) + 1.0 / (r * theta), 1.0 / r);
  CHECK(lions_peetre_norm(f, theta, r) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(lions_peetre_norm(ConcavePL(), 0.5, 2.0) == 0.0);
  CHECK(std::isinf(lions_peetre_norm(ConcavePL::affine(1.0, 0.0), 0.5, 2.0)));
  CHECK_THROWS_AS(lions_peetre_norm(f, 1.0, 2.0), ValidationError);

  std::mt19937_64 rng(32);
  const CoupleDescriptor c = CoupleDescriptor::sequence_lp(1.0, kInf);
  for (int rep = 0; rep < 30; ++rep) {
    const VecXd x = random_seq(rng, 1 + rep % 9);
    const double lp = lions_peetre_norm(Element{x}, c, 0.5, 2.0);
    CHECK(lions_peetre_norm(Element{VecXd(2.0 * x)}, c, 0.5, 2.0) ==
          doctest::Approx(2.0 * lp).epsilon(1e-12));
    // Two code paths for one definition.
    const double grid = k_space_norm(Element{x}, c, ParameterLattice::lq_dyadic(2.0, 0.5)).value;
    CHECK(grid == doctest::Approx(lp).epsilon(1e-2));
  }
}

TEST_CASE("orbit norm") {
  std::mt19937_64 rng(33);
  const CoupleDescriptor c = CoupleDescriptor::sequence_lp(1.0, kInf);
  const VecXd x = random_seq(rng, 5);
  CHECK(orbit_norm(Element{x}, c, Element{x}, c) == doctest::Approx(1.0));
  CHECK(orbit_norm(Element{VecXd(2.0 * x)}, c, Element{x}, c) == doctest::Approx(2.0));
  CHECK(orbit_norm(min_curve(1.0, 1.0), min_curve(2.0, 1.0)) == doctest::Approx(1.0));
  CHECK(std::isinf(orbit_norm(ConcavePL::affine(0.0, 1.0), min_curve(1.0, 1.0))));
  CHECK_THROWS_AS(orbit_norm(Element{x}, c, Element{VecXd(VecXd::Zero(5))}, c), ValidationError);
  // Dense sampling never exceeds the knot-wise sup.
  for (int rep = 0; rep < 30; ++rep) {
    const ConcavePL ky = k_curve(Element{random_seq(rng, 4)}, c).curve;
    const ConcavePL kx = k_curve(Element{random_seq(rng, 4)}, c).curve;
    const double sup = orbit_norm(ky, kx);
    for (double t = 1.0 / 64; t < 64; t *= 1.1) CHECK(ky(t) / kx(t) <= sup * (1 + 1e-12));
  }
}

TEST_CASE("hat norm cover search") {
  EHatNorm cfg;
  cfg.couple = CoupleDescriptor::sequence_lp(1.0, kInf);
  cfg.space = Leg{1.0, {}, false};
  cfg.dimension = 4;
  const ConcavePL ke1 = min_curve(1.0, 1.0);
  const EHatResult one = e_hat_upper(ke1, cfg);
  CHECK(one.value == doctest::Approx(1.0));
  CHECK(e_hat_upper(ConcavePL(), cfg).value == 0.0);
  const EHatResult two = e_hat_upper(ke1 + ke1, cfg);
  CHECK(two.value <= 2.0 + 1e-9);
  // The cover really covers.
  for (int i = 0; i < cfg.grid.size(); ++i) {
    const double t = cfg.grid.node(i);
    double s = 0.0;
    for (const CoverElement& ce : two.cover) s += ce.k(t);
    CHECK(s >= 2.0 * ke1(t) * (1.0 - 1e-9));
  }
  cfg.p = 0.5;
  cfg.q = 0.75;
  CHECK_THROWS_AS(e_hat_upper(ke1, cfg), ValidationError);
  cfg.dimension = 0;
  cfg.q = 0.5;
  CHECK_THROWS_AS(e_hat_upper(ke1, cfg), ValidationError);
}

TEST_CASE("hat norm is q-subadditive for p = q") {
  std::mt19937_64 rng(34);
  EHatNorm cfg;
  cfg.couple = CoupleDescriptor::sequence_lp(0.5, kInf);
  cfg.space = Leg{0.5, {}, false};
  cfg.dimension = 4;
  cfg.p = 0.5;
  cfg.q = 0.5;
  for (int rep = 0; rep < 10; ++rep) {
    const ConcavePL f = k_curve(Element{random_seq(rng, 4)}, cfg.couple).curve;
    const ConcavePL g = k_curve(Element{random_seq(rng, 4)}, cfg.couple).curve;
    const double vf = e_hat_upper(f, cfg).value;
    const double vg = e_hat_upper(g, cfg).value;
    const double vs = e_hat_upper(f + g, cfg).value;
    CHECK(std::pow(vs, cfg.q) <= (std::pow(vf, cfg.q) + std::pow(vg, cfg.q)) * (1 + 1e-9));
  }
}
