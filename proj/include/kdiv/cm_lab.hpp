#pragma once

#include "kdiv/kfunctional.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kdiv {

struct Domination {
  bool holds = true;
  /// min over the grid and curve knots of K(t, x) - K(t, y).
  double margin = 0.0;
};

/// K(t, y; Y) <= K(t, x; X) at every grid node, every knot of both curves
/// and at both asymptotes (value at 0+, slope at 0+, terminal slope, limit).
Domination k_dominates(const Element& y, const CoupleDescriptor& y_couple, const Element& x,
                       const CoupleDescriptor& x_couple, const KOptions& options = {});
Domination k_dominates(const Element& y, const Element& x, const CoupleDescriptor& couple,
                       const KOptions& options = {});

enum class WitnessStatus { Feasible, Infeasible, IterationLimit };
const char* to_string(WitnessStatus s);

struct OperatorWitness {
  MatXd T;
  double norm0 = 0.0;     // l^1 -> l^1: max absolute column sum
  double norm1 = 0.0;     // l^inf -> l^inf: max absolute row sum
  double residual = 0.0;  // max |Tx - y|
  double bound = 1.0;
  WitnessStatus status = WitnessStatus::Infeasible;
  bool exact = false;  // solved in rational arithmetic
  /// K(t, Tx) <= bound K(t, x) on the grid and at the asymptotes.
  bool domination_audit = false;
};

struct WitnessOptions {
  Eigen::Index max_dimension = 16;
  /// Rational pivoting up to this dimension, doubles above.
  Eigen::Index exact_up_to = 8;
  int max_iterations = 200000;
  KOptions k;
};

/// Finds T with Tx = y and both (l^1, l^inf) operator norms <= bound, as an
/// LP in T = P - N with P, N >= 0. Diagonal entries are preferred, so y = x
/// yields the identity on the support of x.
OperatorWitness cm_witness_l1_linf(const VecXd& x, const VecXd& y, double bound,
                                   const WitnessOptions& options = {});

struct ProbeInstance {
  Element x;
  std::vector<Element> pieces;
};

struct MonotonicityEstimate {
  int trials = 0;
  double worst_ratio = 0.0;
  /// Running maximum of the ratio after each trial.
  std::vector<double> history;
  /// Instance with ratio > 1, if one was found.
  std::optional<ProbeInstance> violating;
};

/// |x|_X / (sum |x_i|_X^q)^{1/q}; 0 when x = 0.
double kpq_ratio(const Element& x, const std::vector<Element>& pieces, const Leg& space, double q);

struct ProbeOptions {
  int trials = 500;
  Eigen::Index dimension = 4;
  int pieces = 3;
  std::uint64_t seed = 1;
  KOptions k;
};

/// Random search for the K(p, q)-monotonicity constant of the space X
/// inside the couple: instances satisfy K(t, x) <= (sum K(t, x_i)^p)^{1/p}
/// at every grid node; the estimate is a lower bound for the constant.
/// Requires 0 < q <= p <= 1.
MonotonicityEstimate kpq_probe(const Leg& space, const CoupleDescriptor& couple, double p, double q,
                               const ProbeOptions& options = {});

struct NonCmRow {
  Eigen::Index n = 1;
  double ratio_lp_l1 = 1.0;  // |x_n|_{l^p} / |x_n|_{l^1}
  double sup_k = 0.0;        // sup_t K(t, x_n; l^p, l^q)
  double norm_lp = 0.0;
};

/// x_n = (1, ..., 1, 0, ...) / n for n = 1, ..., n_max.
/// Requires 0 < p < 1 and p <= q.
std::vector<NonCmRow> non_cm_demo(double p, double q, Eigen::Index n_max, const KOptions& options = {});

}  // namespace kdiv
