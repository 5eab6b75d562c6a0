#include "kdiv/concave_pl.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace kdiv;

TEST_CASE("affine curve") {
  const ConcavePL f = ConcavePL::affine(2.0, 0.5);
  CHECK(f(0.0) == 2.0);
  CHECK(f(4.0) == doctest::Approx(4.0));
  CHECK(f.is_conv());
  CHECK_FALSE(f.is_conv0());
  CHECK(ConcavePL::affine(0.0, 0.0).is_conv0());
  CHECK(std::isinf(f.limit_at_infinity()));
}

TEST_CASE("constructor rejects malformed knots") {
  CHECK_THROWS_AS(ConcavePL(VecXd::Ones(1), VecXd::Ones(1), 0.0), ValidationError);
  VecXd t(3);
  t << 0.0, 2.0, 1.0;
  CHECK_THROWS_AS(ConcavePL(t, VecXd::Ones(3), 0.0), ValidationError);
  CHECK_THROWS_AS(ConcavePL(VecXd::Zero(2), VecXd::Ones(1), 0.0), ValidationError);
}

TEST_CASE("upper hull of points") {
  std::vector<Point> pts{{1.0, 1.0}, {2.0, 1.5}, {3.0, 1.2}, {0.5, 0.2}};
  const ConcavePL h = ConcavePL::upper_hull(pts, 0.0);
  CHECK(h.is_conv());
  for (const Point& p : pts) CHECK(h(p.t) >= p.y - 1e-12);
  CHECK(h(1.0) == doctest::Approx(1.0));
  CHECK(h(2.0) == doctest::Approx(1.5));
  CHECK(h(10.0) == doctest::Approx(1.5));
  CHECK(h(0.5) == doctest::Approx(0.5));
}

TEST_CASE("lower envelope agrees with the pointwise minimum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<Line> lines;
    const int m = 1 + static_cast<int>(unif(rng) * 8);
    for (int i = 0; i < m; ++i) lines.push_back({3.0 * unif(rng), 3.0 * unif(rng)});
    const ConcavePL env = ConcavePL::lower_envelope(lines);
    CHECK(env.is_conv());
    for (double t : {0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.0, 100.0}) {
      double ref = oracle::inf;
      for (const Line& l : lines) ref = std::min(ref, l(t));
      CHECK(env(t) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("sum of minimums") {
  VecXd a(3), b(3);
  a << 1.0, kInf, 2.0;
  b << 1.0, 0.5, kInf;
  const ConcavePL f = ConcavePL::sum_of_mins(a, b);
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    CHECK(f(t) == doctest::Approx(std::min(1.0, t) + 0.5 * t + 2.0));
  }
  CHECK(f.value_at_zero() == doctest::Approx(2.0));
  CHECK(f.terminal_slope() == doctest::Approx(0.5));
  VecXd bad(3);
  bad << kInf, kInf, 1.0;
  CHECK_THROWS_AS(ConcavePL::sum_of_mins(bad, bad), ValidationError);
}

TEST_CASE("sum and scaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    VecXd a(4), b(4), c(3), d(3);
    for (int i = 0; i < 4; ++i) a(i) = unif(rng), b(i) = unif(rng) * 4;
    for (int i = 0; i < 3; ++i) c(i) = unif(rng), d(i) = unif(rng) * 4;
    const ConcavePL f = ConcavePL::sum_of_mins(a, b);
    const ConcavePL g = ConcavePL::sum_of_mins(c, d);
    const ConcavePL s = f + g;
    const ConcavePL h = f.scaled(3.0);
    CHECK(s.is_conv());
    for (double t : {0.01, 0.3, 1.0, 5.0, 50.0}) {
      CHECK(s(t) == doctest::Approx(f(t) + g(t)));
      CHECK(h(t) == doctest::Approx(3.0 * f(t)));
    }
  }
}

TEST_CASE("validation margin detects convexity violations") {
  VecXd t(3), y(3);
  t << 0.0, 1.0, 2.0;
  y << 0.0, 1.0, 3.0;
  const ConcavePL bad(t, y, 0.0);
  CHECK_FALSE(bad.is_conv());
  CHECK(bad.validation_margin() < 0.0);
  y << 0.0, 2.0, 3.0;
  const ConcavePL good(t, y, 0.5);
  CHECK(good.is_conv());
  CHECK(good.validation_margin() >= 0.0);
  CHECK(good.initial_slope() == doctest::Approx(2.0));
  CHECK(good.segment_slope(1) == doctest::Approx(1.0));
  CHECK(good.segment_slope(2) == doctest::Approx(0.5));
}

TEST_CASE("merged knots") {
  VecXd t1(2), y1(2), t2(3), y2(3);
  t1 << 0.0, 1.0;
  y1 << 0.0, 1.0;
  t2 << 0.0, 0.5, 1.0;
  y2 << 0.0, 1.0, 1.5;
  const VecXd m = merged_knots(ConcavePL(t1, y1, 0.0), ConcavePL(t2, y2, 0.0));
  REQUIRE(m.size() == 2);
  CHECK(m(0) == 0.5);
  CHECK(m(1) == 1.0);
}
