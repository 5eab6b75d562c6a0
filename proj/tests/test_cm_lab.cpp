#include "kdiv/cm_lab.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>

using namespace kdiv;

namespace {

VecXd vec(std::initializer_list<double> v) {
  VecXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

const CoupleDescriptor kL1Linf = CoupleDescriptor::sequence_lp(1.0, kInf);

// Weak majorization: partial sums of y* below those of x*.
bool submajorized(const VecXd& y, const VecXd& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  std::vector<double> b(y.data(), y.data() + y.size());
  for (double& v : a) v = std::abs(v);
  for (double& v : b) v = std::abs(v);
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
    sa += k < a.size() ? a[k] : 0.0;
    sb += k < b.size() ? b[k] : 0.0;
    if (sb > sa * (1 + 1e-9)) return false;
  }
  return true;
}

// Random T with both (l1, linf) norms equal to one.
MatXd random_contraction(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatXd T(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) T(i, j) = std::abs(u(rng)) < 0.4 ? 0.0 : u(rng);
  }
  const double s = std::max(T.cwiseAbs().colwise().sum().maxCoeff(), T.cwiseAbs().rowwise().sum().maxCoeff());
  return s > 0.0 ? MatXd(T / s) : MatXd::Identity(n, n);
}

VecXd random_x(std::mt19937_64& rng, Eigen::Index n) {
  const auto v = oracle::random_vector(rng, static_cast<std::size_t>(n), 0.1);
  return Eigen::Map<const VecXd>(v.data(), n);
}

}  // namespace

TEST_CASE("K-domination") {
  const VecXd x = vec({2, 0});
  const Domination self = k_dominates(Element{x}, Element{x}, kL1Linf);
  CHECK(self.holds);
  CHECK(self.margin == 0.0);
  CHECK_FALSE(k_dominates(Element{VecXd(2 * x)}, Element{x}, kL1Linf).holds);
  const Domination d = k_dominates(Element{vec({1, 1})}, Element{x}, kL1Linf);
  CHECK(d.holds);
  CHECK(d.margin == doctest::Approx(0.0));
  CHECK_FALSE(k_dominates(Element{x}, Element{vec({1, 1})}, kL1Linf).holds);

  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + rep % 6;
    const VecXd a = random_x(rng, n);
    const VecXd b = random_x(rng, n);
    CHECK(k_dominates(Element{b}, Element{a}, kL1Linf).holds == submajorized(b, a));
  }
}

TEST_CASE("Calderon-Mityagin witnesses") {
  SUBCASE("identity") {
    const VecXd x = vec({1, -3, 0.5});
    const OperatorWitness w = cm_witness_l1_linf(x, x, 1.0);
    REQUIRE(w.status == WitnessStatus::Feasible);
    CHECK(w.exact);
    CHECK(w.T == MatXd::Identity(3, 3));
  }
  SUBCASE("averaging") {
    const OperatorWitness w = cm_witness_l1_linf(vec({2, 0}), vec({1, 1}), 1.0);
    REQUIRE(w.status == WitnessStatus::Feasible);
    MatXd expect(2, 2);
    expect << 0.5, 0.0, 0.5, 0.0;
    CHECK(w.T == expect);
    CHECK(w.norm0 == 1.0);
    CHECK(w.norm1 == 0.5);
    CHECK(w.residual == 0.0);
    CHECK(w.domination_audit);
  }
  SUBCASE("not dominated") {
    const OperatorWitness w = cm_witness_l1_linf(vec({1, 1}), vec({2, 0}), 1.0);
    CHECK(w.status == WitnessStatus::Infeasible);
  }
  SUBCASE("dimension cap") {
    WitnessOptions o;
    o.max_dimension = 2;
    CHECK_THROWS_AS(cm_witness_l1_linf(VecXd::Ones(3), VecXd::Ones(3), 1.0, o), ValidationError);
    CHECK_THROWS_AS(cm_witness_l1_linf(VecXd::Ones(3), VecXd::Ones(2), 1.0), ValidationError);
  }
  SUBCASE("random dominated pairs") {
    std::mt19937_64 rng(23);
    const auto start = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 200; ++rep) {
      const Eigen::Index n = 1 + rep % 8;
      const VecXd x = random_x(rng, n);
      const VecXd y = random_contraction(rng, n) * x;
      REQUIRE(k_dominates(Element{y}, Element{x}, kL1Linf).holds);
      const double c = 1.0 + 1e-6;
      const OperatorWitness w = cm_witness_l1_linf(x, y, c);
      REQUIRE(w.status == WitnessStatus::Feasible);
      CHECK(w.residual <= 1e-8);
      CHECK(w.norm0 <= c + 1e-9);
      CHECK(w.norm1 <= c + 1e-9);
      CHECK(w.domination_audit);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 30.0);
  }
  SUBCASE("random pairs: feasible only when dominated") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 60; ++rep) {
      const Eigen::Index n = 1 + rep % 5;
      const VecXd x = random_x(rng, n);
      const VecXd y = random_x(rng, n);
      const OperatorWitness w = cm_witness_l1_linf(x, y, 1.0);
      CHECK((w.status == WitnessStatus::Feasible) == submajorized(y, x));
    }
  }
  SUBCASE("double precision above the exact cap") {
    std::mt19937_64 rng(31);
    const VecXd x = random_x(rng, 12);
    const VecXd y = random_contraction(rng, 12) * x;
    const OperatorWitness w = cm_witness_l1_linf(x, y, 1.0 + 1e-6);
    REQUIRE(w.status == WitnessStatus::Feasible);
    CHECK_FALSE(w.exact);
    CHECK(w.residual <= 1e-8);
  }
}

TEST_CASE("K(p, q) monotonicity probe") {
  const Leg l1{1.0, {}, false};
  const VecXd x = vec({1, 2});
  CHECK(kpq_ratio(Element{x}, {Element{x}}, l1, 0.5) == doctest::Approx(1.0));
  CHECK(kpq_ratio(Element{VecXd::Zero(2)}, {Element{x}}, l1, 0.5) == 0.0);

  ProbeOptions o;
  o.trials = 100;
  const Leg lr{0.75, {}, false};
  const CoupleDescriptor c = CoupleDescriptor::sequence_lp(0.5, kInf);
  const MonotonicityEstimate e = kpq_probe(lr, c, 0.5, 0.5, o);
  CHECK(e.trials == 100);
  CHECK(std::isfinite(e.worst_ratio));
  CHECK(e.worst_ratio > 0.0);
  CHECK(std::is_sorted(e.history.begin(), e.history.end()));
  CHECK(e.history.back() == e.worst_ratio);
  // Same seed, same estimate.
  CHECK(kpq_probe(lr, c, 0.5, 0.5, o).worst_ratio == e.worst_ratio);

  CHECK_THROWS_AS(kpq_probe(lr, c, 0.5, 0.75, o), ValidationError);
  CHECK_THROWS_AS(kpq_probe(lr, c, 1.5, 0.5, o), ValidationError);
}

TEST_CASE("non-CM demonstration") {
  const auto rows = non_cm_demo(0.5, kInf, 1024);
  REQUIRE(rows.size() == 1024);
  CHECK(rows[0].ratio_lp_l1 == doctest::Approx(1.0));
  CHECK(rows[3].n == 4);
  CHECK(rows[3].ratio_lp_l1 == doctest::Approx(4.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double n = static_cast<double>(rows[i].n);
    CHECK(std::abs(rows[i].ratio_lp_l1 / n - 1.0) <= 1e-9);
    CHECK(oracle::rel_diff(rows[i].sup_k, rows[i].norm_lp) <= 1e-9);
    if (i > 0) CHECK(rows[i].ratio_lp_l1 > rows[i - 1].ratio_lp_l1);
  }
  const auto r3 = non_cm_demo(1.0 / 3.0, 2.0, 8);
  CHECK(r3.back().ratio_lp_l1 == doctest::Approx(64.0));
  CHECK_THROWS_AS(non_cm_demo(1.0, kInf, 8), ValidationError);
}
