#include "kdiv/kfunctional.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace kdiv;

namespace {

VecXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const VecXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const VecXd& v) { return {v.begin(), v.end()}; }

const double kTs[] = {1.0 / 64, 0.1, 0.25, 0.5, 1.0, 1.7, 2.0, 4.0, 10.0, 64.0};

}  // namespace

TEST_CASE("weighted l1 closed form") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 6;
    const auto x = oracle::random_vector(rng, n, 0.2);
    std::vector<double> w0(n), w1(n);
    for (std::size_t k = 0; k < n; ++k) {
      w0[k] = unif(rng) < 0.1 ? oracle::inf : 0.1 + unif(rng) * 3;
      w1[k] = std::isinf(w0[k]) || unif(rng) > 0.1 ? 0.1 + unif(rng) * 3 : oracle::inf;
    }
    const KCurve k = k_exact_weighted_l1(to_vec(x), to_vec(w0), to_vec(w1));
    CHECK(k.method == KMethod::ExactWeightedL1);
    CHECK(k.curve.is_conv());
    for (double t : kTs) {
      const double ref = oracle::k_weighted_l1(x, w0, w1, t);
      CHECK(oracle::rel_diff(k(t), ref) <= 1e-12);
      CHECK(k_weighted_l1(to_vec(x), to_vec(w0), to_vec(w1), t) == doctest::Approx(ref));
    }
  }
  VecXd x = VecXd::Ones(1);
  VecXd w = VecXd::Constant(1, kInf);
  CHECK_THROWS_AS(k_exact_weighted_l1(x, w, w), ValidationError);
}

TEST_CASE("L1/Linf closed form for sequences and step functions") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 7;
    const auto x = oracle::random_vector(rng, n, 0.2);
    const KCurve k = k_exact_l1_linf(WeightedSeq(to_vec(x)));
    const std::vector<double> ones(n, 1.0);
    for (double t : kTs) CHECK(oracle::rel_diff(k(t), oracle::k_l1_linf(x, ones, t)) <= 1e-12);

    std::vector<double> len(n);
    VecXd b(n + 1);
    b(0) = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      len[i] = 0.05 + unif(rng);
      b(static_cast<Eigen::Index>(i) + 1) = b(static_cast<Eigen::Index>(i)) + len[i];
    }
    const KCurve kf = k_exact_l1_linf(StepFunction(b, to_vec(x)));
    for (double t : kTs) CHECK(oracle::rel_diff(kf(t), oracle::k_l1_linf(x, len, t)) <= 1e-12);
  }
}

TEST_CASE("hull engine agrees with truncation enumeration") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 6;
    const auto v = oracle::random_vector(rng, n, 0.2);
    std::vector<double> left(n);
    VecXd b(n + 1);
    b(0) = unif(rng) < 0.5 ? 0.0 : unif(rng);
    for (std::size_t i = 0; i < n; ++i) {
      left[i] = b(static_cast<Eigen::Index>(i));
      b(static_cast<Eigen::Index>(i) + 1) = left[i] + 0.05 + unif(rng);
    }
    const StepFunction h(b, to_vec(v));
    const KCurve k = k_exact_linfty_couple(h);
    CHECK(k.method == KMethod::ExactHull);
    for (double t : kTs) CHECK(oracle::rel_diff(k(t), oracle::k_hull(v, left, t)) <= 1e-9);
  }
}

TEST_CASE("numeric engine against brute force on lattice inputs") {
  std::mt19937_64 rng(24);
  const std::pair<double, double> couples[] = {{0.5, 1.0}, {0.5, kInf}, {1.0, kInf}, {1.0, 2.0}};
  for (const auto& [p, q] : couples) {
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t n = 1 + rep % 3;
      const auto x = oracle::lattice_vector(rng, n);
      const CoupleDescriptor c = CoupleDescriptor::sequence_lp(p, q);
      for (double t : {0.125, 0.5, 1.0, 3.0}) {
        const KValue kv = k_numeric(Element{to_vec(x)}, c, t);
        const double ref = oracle::k_bruteforce(x, {}, p, {}, q, t);
        // Brute force searches a subset of splits.
        CHECK(kv.value <= ref * (1.0 + 1e-12));
        if (q != 2.0) CHECK(oracle::rel_diff(kv.value, ref) <= 1e-3);
      }
    }
  }
}

TEST_CASE("numeric witness reproduces its value") {
  std::mt19937_64 rng(25);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = oracle::random_vector(rng, 5, 0.1);
    const CoupleDescriptor c = CoupleDescriptor::sequence_lp(1.5, 3.0);
    const KValue kv = k_numeric(Element{to_vec(x)}, c, 0.7);
    const VecXd sum = element_values(kv.witness.x0) + element_values(kv.witness.x1);
    CHECK((sum - to_vec(x)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(kv.value == doctest::Approx(kv.witness.norm0 + 0.7 * kv.witness.norm1));
    CHECK(kv.witness.norm0 == doctest::Approx(oracle::norm(to_std(element_values(kv.witness.x0)), {}, 1.5)));
    // No worse than either trivial split.
    CHECK(kv.value <= oracle::norm(x, {}, 1.5) + 1e-12);
    CHECK(kv.value <= 0.7 * oracle::norm(x, {}, 3.0) + 1e-12);
  }
}

TEST_CASE("K is homogeneous and swap-symmetric") {
  std::mt19937_64 rng(26);
  const Leg a{0.5, {}, false};
  const Leg b{kInf, {}, false};
  for (int rep = 0; rep < 20; ++rep) {
    const VecXd x = to_vec(oracle::random_vector(rng, 4));
    for (double t : {0.2, 1.0, 5.0}) {
      const double k = k_pointwise(Element{x}, a, b, t).value;
      CHECK(k_pointwise(Element{VecXd(3.0 * x)}, a, b, t).value == doctest::Approx(3.0 * k));
      CHECK(t * k_pointwise(Element{x}, b, a, 1.0 / t).value == doctest::Approx(k));
    }
  }
}

TEST_CASE("pointwise curve is exact for exhaustive families") {
  std::mt19937_64 rng(27);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::lattice_vector(rng, 3);
    const KCurve k = k_curve(Element{to_vec(x)}, CoupleDescriptor::sequence_lp(0.5, kInf));
    CHECK(k.method == KMethod::Numeric);
    CHECK(k.accuracy == 0.0);
    CHECK(k.curve.is_conv());
    for (double t : kTs) {
      CHECK(oracle::rel_diff(k(t), oracle::k_bruteforce(x, {}, 0.5, {}, kInf, t)) <= 1e-9);
    }
  }
}

TEST_CASE("dispatch picks closed forms") {
  const VecXd x = VecXd::LinSpaced(4, 1.0, 4.0);
  CHECK(k_curve(Element{x}, CoupleDescriptor::sequence_lp(1.0, kInf)).method == KMethod::ExactL1Linf);
  CHECK(k_curve(Element{x}, CoupleDescriptor::sequence_lp(1.0, 1.0)).method ==
        KMethod::ExactWeightedL1);
  CHECK(k_curve(Element{x}, CoupleDescriptor::weighted_l1(VecXd::Ones(4), VecXd::Ones(4))).method ==
        KMethod::ExactWeightedL1);
  const StepFunction f = StepFunction::from_sequence(x);
  CHECK(k_curve(Element{f}, CoupleDescriptor::function_lp(1.0, kInf)).method == KMethod::ExactL1Linf);
  CHECK(k_curve(Element{f}, CoupleDescriptor::linfty_couple()).method == KMethod::ExactHull);
  CHECK(k_curve(Element{x}, CoupleDescriptor::sequence_lp(2.0, 3.0)).method == KMethod::Numeric);
  CHECK(to_string(KMethod::ExactHull) == "exact_hull");
}

TEST_CASE("numeric engine input validation") {
  const Element x{VecXd(VecXd::Ones(2))};
  CHECK_THROWS_AS(k_numeric(x, CoupleDescriptor::sequence_lp(1.0, 2.0), 1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(k_numeric(x, CoupleDescriptor::sequence_lp(1.0, 2.0), -1.0), ValidationError);
  CHECK_THROWS_AS(k_numeric(x, CoupleDescriptor::weighted_l1(VecXd::Ones(2), VecXd::Ones(2)), 1.0),
                  ValidationError);
  CHECK_THROWS_AS(k_numeric(Element{VecXd(VecXd::Ones(3))},
                            CoupleDescriptor::sequence_lp(1.0, 2.0, VecXd::Ones(2), VecXd::Ones(2)),
                            1.0),
                  ValidationError);
}

TEST_CASE("Conv function to dyadic element") {
  VecXd t(4), y(4);
  t << 0.0, 0.75, 3.0, 10.0;
  y << 0.5, 2.0, 4.0, 5.0;
  const ConcavePL phi(t, y, 0.1);
  const ConvElement ce = conv_to_element(phi);
  CHECK(ce.element.alpha == doctest::Approx(0.5));
  CHECK(ce.element.beta == doctest::Approx(0.1));
  CHECK(ce.band_lower >= 1.0 - 1e-12);
  CHECK(ce.band_upper <= 2.0 + 1e-12);
  const ConcavePL kb = ce.element.k_curve();
  for (double s : {1e-3, 0.3, 1.0, 2.5, 7.0, 30.0, 1e4}) {
    CHECK(kb(s) >= phi(s) * (1.0 - 1e-12));
    CHECK(kb(s) <= 2.0 * phi(s) * (1.0 + 1e-12));
  }
  // Knots at powers of two are reproduced exactly.
  VecXd t2(3), y2(3);
  t2 << 0.0, 1.0, 4.0;
  y2 << 0.0, 1.0, 2.5;
  const ConcavePL psi(t2, y2, 0.0);
  const ConvElement e2 = conv_to_element(psi);
  CHECK(e2.band_lower == doctest::Approx(1.0));
  CHECK(e2.band_upper == doctest::Approx(1.0));
  CHECK(e2.element.n_min == 0);
  CHECK(e2.element.n_max == 2);
  VecXd nc_t(2), nc_y(2);
  nc_t << 0.0, 1.0;
  nc_y << 1.0, 0.5;
  CHECK_THROWS_AS(conv_to_element(ConcavePL(nc_t, nc_y, 0.0)), ValidationError);
}

TEST_CASE("worked examples") {
  SUBCASE("weighted l1, x = (1, 1)") {
    const VecXd one = VecXd::Ones(2);
    VecXd w1(2);
    w1 << 1.0, 2.0;
    for (double t : kTs) {
      // Brute force over the 21-point split lattice of each coordinate.
      const double brute = oracle::k_bruteforce({1, 1}, {1, 1}, 1.0, {1, 2}, 1.0, t);
      CHECK(k_weighted_l1(one, one, w1, t) == doctest::Approx(brute));
      CHECK(k_weighted_l1(one, one, w1, t) == doctest::Approx(std::min(1.0, t) + std::min(1.0, 2 * t)));
    }
    CHECK(k_exact_weighted_l1(VecXd::Zero(2), one, w1).curve(3.0) == 0.0);
    CHECK(k_weighted_l1(VecXd::Ones(1), VecXd::Ones(1), VecXd::Ones(1), 0.25) == 0.25);
  }
  SUBCASE("L1/Linf step functions") {
    VecXd b(2), v(1);
    b << 0.0, 2.0;
    v << 1.0;
    const KCurve ind = k_exact_l1_linf(StepFunction(b, v));
    VecXd b2(3), v2(2);
    b2 << 0.0, 1.0, 2.0;
    v2 << 1.0, -3.0;
    const KCurve two = k_exact_l1_linf(StepFunction(b2, v2));
    for (double t : kTs) {
      CHECK(ind(t) == doctest::Approx(std::min(t, 2.0)));
      const double expect = t <= 1.0 ? 3.0 * t : (t <= 2.0 ? 2.0 + t : 4.0);
      CHECK(two(t) == doctest::Approx(expect));
    }
    CHECK(two.curve.limit_at_infinity() == doctest::Approx(4.0));
  }
  SUBCASE("Linf couple hulls") {
    VecXd b(3), v(2);
    b << 0.0, 1.0, 2.0;
    v << 0.0, 1.0;
    const KCurve k = k_exact_linfty_couple(StepFunction(b, v));
    for (double t : kTs) CHECK(k(t) == doctest::Approx(std::min(t, 1.0)));
  }
  SUBCASE("(l^1/2, l^inf), x = e_1") {
    const CoupleDescriptor c = CoupleDescriptor::sequence_lp(0.5, kInf);
    VecXd e1 = VecXd::Zero(3);
    e1(0) = 1.0;
    for (double t : kTs) CHECK(k_numeric(Element{e1}, c, t).value == doctest::Approx(std::min(1.0, t)));
    const KValue z = k_numeric(Element{VecXd::Zero(3)}, c, 1.0);
    CHECK(z.value == 0.0);
    CHECK(element_is_zero(z.witness.x0));
    CHECK(element_is_zero(z.witness.x1));
  }
  SUBCASE("(l1, linf) numeric against the discrete Calderon formula") {
    std::mt19937_64 rng(3);
    const CoupleDescriptor c = CoupleDescriptor::sequence_lp(1.0, kInf);
    for (int rep = 0; rep < 20; ++rep) {
      const VecXd x = to_vec(oracle::random_vector(rng, 4));
      const KCurve exact = k_exact_l1_linf(WeightedSeq(x));
      for (double t : kTs) CHECK(oracle::rel_diff(k_numeric(Element{x}, c, t).value, exact(t)) <= 1e-6);
    }
  }
}

TEST_CASE("dyadic elements of simple Conv functions") {
  VecXd t(2), y(2);
  t << 0.0, 1.0;
  y << 0.0, 1.0;
  const ConvElement m = conv_to_element(ConcavePL(t, y, 0.0));
  CHECK(m.element.n_min == 0);
  CHECK(m.element.b.size() == 1);
  CHECK(m.element.b(0) == doctest::Approx(1.0));
  CHECK(m.element.alpha == 0.0);
  CHECK(m.element.beta == 0.0);
  for (double s : kTs) CHECK(m.element.k_curve()(s) == doctest::Approx(std::min(1.0, s)));

  const ConvElement lin = conv_to_element(ConcavePL::affine(0.0, 1.0));
  CHECK(lin.element.beta == 1.0);
  CHECK(lin.element.alpha == 0.0);
  CHECK(lin.element.b.isZero(0.0));

  const ConvElement cst = conv_to_element(ConcavePL::affine(1.0, 0.0));
  CHECK(cst.element.alpha == 1.0);
  CHECK(cst.element.beta == 0.0);
  CHECK(cst.element.b.isZero(0.0));
}

TEST_CASE("envelope with crossings that coincide up to rounding") {
  VecXd x(4);
  x << -1.9502464196838987, -0.49988027615089287, 2.3356881609179143, -6.5027045070614182;
  const ConcavePL k = k_curve(Element{x}, CoupleDescriptor::sequence_lp(0.5, 1.0)).curve;
  CHECK(k.validation_margin() >= -1e-9);
  CHECK(k(1.0) == doctest::Approx(11.288519363814112));
}
