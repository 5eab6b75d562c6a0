#include "kdiv/cm_lab.hpp"

#include "kdiv/simplex.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <random>

namespace kdiv {

namespace {

constexpr double kDominationTolerance = 1e-9;

bool leq(double a, double b, double tol) { return a <= b + tol * std::max(std::abs(b), 1e-300); }

template <typename Scalar>
LpResult<Scalar> solve_witness_lp(const VecXd& x, const VecXd& y, double bound, int max_iterations) {
  const auto n = static_cast<std::size_t>(x.size());
  const std::size_t nn = n * n;
  DenseSimplex<Scalar> lp(2 * nn);
  auto P = [&](std::size_t i, std::size_t j) { return i * n + j; };
  auto N = [&](std::size_t i, std::size_t j) { return nn + i * n + j; };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> a(2 * nn, Scalar(0));
    for (std::size_t j = 0; j < n; ++j) {
      const Scalar xj(x(static_cast<Eigen::Index>(j)));
      a[P(i, j)] = xj;
      a[N(i, j)] = -xj;
    }
    lp.add_constraint(std::move(a), Relation::Equal, Scalar(y(static_cast<Eigen::Index>(i))));
  }
  const Scalar c(bound);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Scalar> row(2 * nn, Scalar(0));
    std::vector<Scalar> col(2 * nn, Scalar(0));
    for (std::size_t m = 0; m < n; ++m) {
      row[P(k, m)] = row[N(k, m)] = Scalar(1);
      col[P(m, k)] = col[N(m, k)] = Scalar(1);
    }
    lp.add_constraint(std::move(row), Relation::LessEq, c);
    lp.add_constraint(std::move(col), Relation::LessEq, c);
  }
  std::vector<Scalar> cost(2 * nn, Scalar(2));
  for (std::size_t i = 0; i < n; ++i) cost[P(i, i)] = cost[N(i, i)] = Scalar(1);
  lp.set_objective(std::move(cost));
  return lp.solve(max_iterations);
}

double to_double(double v) { return v; }
double to_double(const mpq_class& v) { return v.get_d(); }

template <typename Scalar>
void fill_witness(OperatorWitness& w, const LpResult<Scalar>& r, Eigen::Index n) {
  switch (r.status) {
    case LpStatus::Optimal: w.status = WitnessStatus::Feasible; break;
    case LpStatus::IterationLimit: w.status = WitnessStatus::IterationLimit; break;
    default: w.status = WitnessStatus::Infeasible; break;
  }
  w.T = MatXd::Zero(n, n);
  if (w.status != WitnessStatus::Feasible) return;
  const auto nn = static_cast<std::size_t>(n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto k = static_cast<std::size_t>(i * n + j);
      // Difference taken exactly before rounding.
      w.T(i, j) = to_double(Scalar(r.x[k] - r.x[nn + k]));
    }
  }
}

}  // namespace

Domination k_dominates(const Element& y, const CoupleDescriptor& y_couple, const Element& x,
                       const CoupleDescriptor& x_couple, const KOptions& options) {
  const KCurve ky = k_curve(y, y_couple, options);
  const KCurve kx = k_curve(x, x_couple, options);
  const double tol = kDominationTolerance + ky.accuracy + kx.accuracy;
  const ConcavePL& fy = ky.curve;
  const ConcavePL& fx = kx.curve;

  Domination d;
  d.margin = fx.value_at_zero() - fy.value_at_zero();
  d.holds = leq(fy.value_at_zero(), fx.value_at_zero(), tol);
  auto visit = [&](double t) {
    const double a = fx(t);
    const double b = fy(t);
    d.margin = std::min(d.margin, a - b);
    if (!leq(b, a, tol)) d.holds = false;
  };
  for (int i = 0; i < options.grid.size(); ++i) visit(options.grid.node(i));
  const VecXd knots = merged_knots(fx, fy);
  for (Eigen::Index i = 0; i < knots.size(); ++i) {
    if (knots(i) > 0.0) visit(knots(i));
  }
  if (fy.value_at_zero() == 0.0 && fx.value_at_zero() == 0.0 &&
      !leq(fy.initial_slope(), fx.initial_slope(), tol)) {
    d.holds = false;
  }
  if (!leq(fy.terminal_slope(), fx.terminal_slope(), tol)) d.holds = false;
  if (fx.terminal_slope() == 0.0 && !leq(fy.limit_at_infinity(), fx.limit_at_infinity(), tol)) {
    d.holds = false;
    d.margin = std::min(d.margin, fx.limit_at_infinity() - fy.limit_at_infinity());
  }
  return d;
}

Domination k_dominates(const Element& y, const Element& x, const CoupleDescriptor& couple,
                       const KOptions& options) {
  return k_dominates(y, couple, x, couple, options);
}

const char* to_string(WitnessStatus s) {
  switch (s) {
    case WitnessStatus::Feasible: return "feasible";
    case WitnessStatus::Infeasible: return "infeasible";
    case WitnessStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

OperatorWitness cm_witness_l1_linf(const VecXd& x, const VecXd& y, double bound,
                                   const WitnessOptions& options) {
  if (x.size() != y.size()) throw ValidationError("witness: x and y differ in dimension");
  if (x.size() == 0) throw ValidationError("witness: empty vectors");
  if (x.size() > options.max_dimension) {
    throw ValidationError("witness: dimension " + std::to_string(x.size()) + " exceeds the cap " +
                          std::to_string(options.max_dimension));
  }
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("witness: entries must be finite");
  if (!(bound > 0.0) || std::isinf(bound)) throw ValidationError("witness: bound must be positive and finite");

  const Eigen::Index n = x.size();
  OperatorWitness w;
  w.bound = bound;
  w.exact = n <= options.exact_up_to;
  if (w.exact) {
    fill_witness(w, solve_witness_lp<mpq_class>(x, y, bound, options.max_iterations), n);
  } else {
    fill_witness(w, solve_witness_lp<double>(x, y, bound, options.max_iterations), n);
  }
  if (w.status == WitnessStatus::IterationLimit) {
    throw NumericError("witness: LP iteration limit reached");
  }
  if (w.status != WitnessStatus::Feasible) return w;

  w.norm0 = w.T.cwiseAbs().colwise().sum().maxCoeff();
  w.norm1 = w.T.cwiseAbs().rowwise().sum().maxCoeff();
  const VecXd tx = w.T * x;
  w.residual = (tx - y).cwiseAbs().maxCoeff();
  const CoupleDescriptor couple = CoupleDescriptor::sequence_lp(1.0, kInf);
  w.domination_audit = k_dominates(Element{VecXd(tx / bound)}, Element{x}, couple, options.k).holds;
  return w;
}

double kpq_ratio(const Element& x, const std::vector<Element>& pieces, const Leg& space, double q) {
  if (!(q > 0.0)) throw ValidationError("kpq ratio: q must be positive");
  const double top = element_is_zero(x) ? 0.0 : quasi_norm(x, space);
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (const Element& e : pieces) {
    if (!element_is_zero(e)) s += std::pow(quasi_norm(e, space), q);
  }
  return s > 0.0 ? top / std::pow(s, 1.0 / q) : kInf;
}

MonotonicityEstimate kpq_probe(const Leg& space, const CoupleDescriptor& couple, double p, double q,
                               const ProbeOptions& options) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw ValidationError("kpq probe: exponents must lie in (0, 1]");
  }
  if (q > p) throw ValidationError("kpq probe: q must not exceed p");
  if (couple.kind != CoupleKind::SequenceLp) throw ValidationError("kpq probe: sequence couples only");
  if (options.trials < 0 || options.dimension < 1 || options.pieces < 1) {
    throw ValidationError("kpq probe: trials, dimension and pieces must be positive");
  }
  couple.validate();
  const Eigen::Index n = options.dimension;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const VecXd nodes = options.k.grid.nodes();
  auto k_on_grid = [&](const VecXd& v) -> VecXd {
    if (v.isZero(0.0)) return VecXd::Zero(nodes.size());
    const KCurve k = k_curve(Element{v}, couple, options.k);
    return k.curve(nodes);
  };

  MonotonicityEstimate est;
  for (int trial = 0; trial < options.trials; ++trial) {
    std::vector<VecXd> pieces;
    VecXd x = VecXd::Zero(n);
    VecXd envelope = VecXd::Zero(nodes.size());
    for (int i = 0; i < options.pieces; ++i) {
      VecXd v(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        v(k) = u(rng) < 0.3 ? 0.0 : (u(rng) < 0.5 ? -1.0 : 1.0) * std::exp2(6.0 * u(rng) - 3.0);
      }
      x += v;
      envelope += k_on_grid(v).array().pow(p).matrix();
      pieces.push_back(std::move(v));
    }
    for (Eigen::Index k = 0; k < n; ++k) x(k) *= 1.0 + 0.5 * (u(rng) - 0.5);
    envelope = envelope.array().pow(1.0 / p).matrix();
    // Shrink x until the hypothesis holds at every node.
    const VecXd kx = k_on_grid(x);
    double lambda = 1.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) {
      if (kx(i) > 0.0) lambda = std::min(lambda, envelope(i) / kx(i));
    }
    x *= lambda * (1.0 - 1e-12);

    std::vector<Element> elems;
    for (const VecXd& v : pieces) elems.emplace_back(v);
    const double ratio = kpq_ratio(Element{x}, elems, space, q);
    est.worst_ratio = std::max(est.worst_ratio, ratio);
    est.history.push_back(est.worst_ratio);
    if (ratio > 1.0 + 1e-12 && !est.violating) est.violating = ProbeInstance{Element{x}, elems};
    ++est.trials;
  }
  return est;
}

std::vector<NonCmRow> non_cm_demo(double p, double q, Eigen::Index n_max, const KOptions& options) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("non-CM demo: p must lie in (0, 1)");
  if (!(q >= p)) throw ValidationError("non-CM demo: q must be at least p");
  if (n_max < 1) throw ValidationError("non-CM demo: n_max must be positive");
  const CoupleDescriptor couple = CoupleDescriptor::sequence_lp(p, q);
  std::vector<NonCmRow> rows;
  for (Eigen::Index n = 1; n <= n_max; ++n) {
    const VecXd x = VecXd::Constant(n, 1.0 / static_cast<double>(n));
    NonCmRow row;
    row.n = n;
    row.norm_lp = lp_norm(x, p);
    row.ratio_lp_l1 = row.norm_lp / lp_norm(x, 1.0);
    // K is nondecreasing with limit |x|_{l^p}; past the ratio of the leg
    // norms the whole of x sits in leg 0.
    const double t = std::max(16.0 * row.norm_lp / lp_norm(x, q), options.grid.node(options.grid.size() - 1));
    row.sup_k = k_numeric(Element{x}, couple, t, options.accuracy).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kdiv
