#include "kdiv/kmethod.hpp"

#include <algorithm>
#include <array>

namespace kdiv {

ParameterLattice ParameterLattice::lq_dyadic(double q, double theta, Grid grid) {
  ParameterLattice e;
  e.q = q;
  e.theta = theta;
  e.grid = grid;
  return e;
}

ParameterLattice ParameterLattice::weighted(double q, VecXd weights, Grid grid) {
  ParameterLattice e;
  e.q = q;
  e.weights = std::move(weights);
  e.grid = grid;
  return e;
}

ParameterLattice ParameterLattice::intersection(std::vector<ParameterLattice> members) {
  ParameterLattice e;
  e.kind = Kind::Intersection;
  e.members = std::move(members);
  return e;
}

void ParameterLattice::validate() const {
  if (kind == Kind::Intersection) {
    if (members.empty()) throw ValidationError("parameter: empty intersection");
    for (const ParameterLattice& m : members) m.validate();
    return;
  }
  if (!(q > 0.0)) throw ValidationError("parameter: q must be positive");
  if (!std::isfinite(theta)) throw ValidationError("parameter: theta must be finite");
  grid.validate();
  if (weights.size() != 0) {
    if (weights.size() != grid.size()) throw ValidationError("parameter: one weight per grid node");
    if ((weights.array() < 0.0).any() || !weights.allFinite()) {
      throw ValidationError("parameter: weights must be finite and nonnegative");
    }
  }
}

double ParameterLattice::node_weight(int i) const {
  return weights.size() != 0 ? weights(i) : std::pow(grid.node(i), -theta);
}

namespace {

ParameterNorm lq_norm(const VecXd& f, const ParameterLattice& e) {
  if (f.size() != e.grid.size()) throw ValidationError("parameter: samples do not match the grid");
  ParameterNorm out;
  const bool sup = std::isinf(e.q);
  const double h = e.grid.log_step();
  double acc = 0.0;
  double coarse = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    if (std::isnan(f(i)) || f(i) < 0.0) throw ValidationError("parameter: samples must be nonnegative");
    const double g = f(i) * e.node_weight(i);
    if (g == 0.0) continue;
    if (sup) {
      acc = std::max(acc, g);
      if (i % 2 == 0) coarse = std::max(coarse, g);
    } else {
      const double term = std::pow(g, e.q);
      acc += term * h;
      if (i % 2 == 0) coarse += 2.0 * term * h;
    }
    if (!(acc <= kDivergenceThreshold)) {
      out.value = kInf;
      out.divergent = true;
      out.quadrature_error = kInf;
      return out;
    }
  }
  out.value = sup ? acc : std::pow(acc, 1.0 / e.q);
  const double cv = sup ? coarse : std::pow(coarse, 1.0 / e.q);
  out.quadrature_error = std::abs(out.value - cv);
  return out;
}

ParameterNorm combine(const std::vector<ParameterNorm>& parts) {
  ParameterNorm out;
  for (const ParameterNorm& p : parts) {
    out.value = std::max(out.value, p.value);
    out.divergent = out.divergent || p.divergent;
    out.quadrature_error = std::max(out.quadrature_error, p.quadrature_error);
  }
  return out;
}

bool is_zero_curve(const ConcavePL& k) {
  return k.knots_y().isZero(0.0) && k.terminal_slope() == 0.0;
}

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290,
                                           0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

}  // namespace

ParameterNorm parameter_norm(const VecXd& samples, const ParameterLattice& E) {
  E.validate();
  if (E.kind == ParameterLattice::Kind::WeightedLqDyadic) return lq_norm(samples, E);
  std::vector<ParameterNorm> parts;
  for (const ParameterLattice& m : E.members) parts.push_back(parameter_norm(samples, m));
  return combine(parts);
}

ParameterNorm parameter_norm(const ConcavePL& f, const ParameterLattice& E) {
  E.validate();
  if (E.kind == ParameterLattice::Kind::WeightedLqDyadic) return lq_norm(f(E.grid.nodes()), E);
  std::vector<ParameterNorm> parts;
  for (const ParameterLattice& m : E.members) parts.push_back(parameter_norm(f, m));
  return combine(parts);
}

ParameterNorm k_space_norm(const Element& x, const CoupleDescriptor& couple,
                           const ParameterLattice& E, const KOptions& options) {
  return parameter_norm(k_curve(x, couple, options).curve, E);
}

double lions_peetre_norm(const ConcavePL& k, double theta, double r) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("Lions-Peetre: theta must lie in (0, 1)");
  if (!(r > 0.0)) throw ValidationError("Lions-Peetre: r must be positive");
  if (is_zero_curve(k)) return 0.0;
  if (k.value_at_zero() > 0.0 || k.terminal_slope() > 0.0) return kInf;
  const VecXd& t = k.knots_t();
  const VecXd& y = k.knots_y();
  const Eigen::Index m = t.size() - 1;  // last knot index; m >= 1 here
  if (std::isinf(r)) {
    double sup = 0.0;
    for (Eigen::Index i = 1; i <= m; ++i) sup = std::max(sup, y(i) * std::pow(t(i), -theta));
    return sup;
  }
  // Closed forms on (0, t_1] (K = s t) and [t_m, inf) (K constant).
  const double s = y(1) / t(1);
  double total = std::pow(s, r) * std::pow(t(1), r * (1.0 - theta)) / (r * (1.0 - theta));
  total += std::pow(y(m), r) * std::pow(t(m), -theta * r) / (theta * r);
  // Interior segments in u = log t, split into pieces of at most a quarter
  // octave.
  const double max_width = std::log(2.0) / 4.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double slope = (y(i + 1) - y(i)) / (t(i + 1) - t(i));
    const double u0 = std::log(t(i));
    const double u1 = std::log(t(i + 1));
    const int pieces = std::max(1, static_cast<int>(std::ceil((u1 - u0) / max_width)));
    const double w = (u1 - u0) / pieces;
    for (int j = 0; j < pieces; ++j) {
      const double mid = u0 + (j + 0.5) * w;
      for (std::size_t g = 0; g < kGaussX.size(); ++g) {
        for (double sign : {-1.0, 1.0}) {
          const double u = mid + sign * kGaussX[g] * w / 2.0;
          const double tt = std::exp(u);
          const double kv = y(i) + slope * (tt - t(i));
          total += kGaussW[g] * w / 2.0 * std::pow(kv * std::exp(-theta * u), r);
        }
      }
    }
  }
  return std::pow(total, 1.0 / r);
}

double lions_peetre_norm(const Element& x, const CoupleDescriptor& couple, double theta, double r,
                         const KOptions& options) {
  return lions_peetre_norm(k_curve(x, couple, options).curve, theta, r);
}

double orbit_norm(const ConcavePL& ky, const ConcavePL& kx) {
  if (is_zero_curve(kx)) throw ValidationError("orbit norm: x must be nonzero");
  double sup = 0.0;
  for (double t : merged_knots(ky, kx)) sup = std::max(sup, ky(t) / kx(t));
  // t -> 0+.
  if (kx.value_at_zero() > 0.0) {
    sup = std::max(sup, ky.value_at_zero() / kx.value_at_zero());
  } else if (ky.value_at_zero() > 0.0) {
    return kInf;
  } else {
    sup = std::max(sup, ky.initial_slope() / kx.initial_slope());
  }
  // t -> inf.
  if (kx.terminal_slope() > 0.0) {
    sup = std::max(sup, ky.terminal_slope() / kx.terminal_slope());
  } else if (ky.terminal_slope() > 0.0) {
    return kInf;
  } else {
    sup = std::max(sup, ky.limit_at_infinity() / kx.limit_at_infinity());
  }
  return sup;
}

double orbit_norm(const Element& y, const CoupleDescriptor& couple_y, const Element& x,
                  const CoupleDescriptor& couple_x, const KOptions& options) {
  if (element_is_zero(x)) throw ValidationError("orbit norm: x must be nonzero");
  return orbit_norm(k_curve(y, couple_y, options).curve, k_curve(x, couple_x, options).curve);
}

void EHatNorm::validate() const {
  couple.validate();
  if (!couple.is_sequence()) throw ValidationError("hat norm: sequence couples only");
  if (!(q > 0.0 && q <= p && p <= 1.0)) throw ValidationError("hat norm: need 0 < q <= p <= 1");
  if (budget <= 0) throw ValidationError("hat norm: budget must be positive");
  grid.validate();
}

std::vector<VecXd> e_hat_dictionary(const EHatNorm& cfg) {
  cfg.validate();
  Eigen::Index n = cfg.dimension;
  if (n == 0) n = std::max(cfg.couple.w0.size(), cfg.couple.w1.size());
  std::vector<VecXd> dict;
  for (Eigen::Index k = 0; k < n && static_cast<int>(dict.size()) < cfg.budget; ++k) {
    dict.push_back(VecXd::Unit(n, k));
  }
  for (Eigen::Index k = 2; k <= n && static_cast<int>(dict.size()) < cfg.budget; ++k) {
    VecXd v = VecXd::Zero(n);
    v.head(k).setOnes();
    dict.push_back(std::move(v));
  }
  if (dict.empty()) throw ValidationError("hat norm: empty dictionary");
  return dict;
}

EHatResult e_hat_upper(const VecXd& samples, const EHatNorm& cfg) {
  const std::vector<VecXd> dict = e_hat_dictionary(cfg);
  if (samples.size() != cfg.grid.size()) throw ValidationError("hat norm: samples do not match the grid");
  if (std::isnan(samples.sum()) || (samples.array() < 0.0).any()) {
    throw ValidationError("hat norm: samples must be nonnegative");
  }
  EHatResult out;
  if (samples.isZero(0.0)) return out;

  const VecXd nodes = cfg.grid.nodes();
  const std::size_t nd = dict.size();
  std::vector<ConcavePL> curves;
  std::vector<double> norms;
  std::vector<double> cost(nd);
  for (std::size_t j = 0; j < nd; ++j) {
    curves.push_back(k_curve(Element{dict[j]}, cfg.couple, KOptions{cfg.grid, 1e-9}).curve);
    norms.push_back(quasi_norm(dict[j], cfg.space));
    cost[j] = std::pow(norms[j], cfg.p);
  }
  DenseSimplex<double> lp(nd);
  lp.set_objective(cost);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    if (samples(i) == 0.0) continue;
    std::vector<double> row(nd);
    for (std::size_t j = 0; j < nd; ++j) row[j] = std::pow(curves[j](nodes(i)), cfg.p);
    lp.add_constraint(std::move(row), Relation::GreaterEq, std::pow(samples(i), cfg.p));
  }
  const LpResult<double> res = lp.solve();
  out.status = res.status;
  if (res.status != LpStatus::Optimal) {
    if (res.status == LpStatus::IterationLimit) throw NumericError("hat norm: LP iteration limit");
    out.value = kInf;
    out.covered = false;
    return out;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < nd; ++j) {
    if (!(res.x[j] > 0.0)) continue;
    const double lambda = std::pow(res.x[j], 1.0 / cfg.p);
    CoverElement ce{lambda * dict[j], lambda * norms[j], curves[j].scaled(lambda)};
    acc += std::pow(ce.norm, cfg.q);
    out.cover.push_back(std::move(ce));
  }
  out.value = std::pow(acc, 1.0 / cfg.q);
  return out;
}

EHatResult e_hat_upper(const ConcavePL& f, const EHatNorm& cfg) {
  cfg.validate();
  return e_hat_upper(f(cfg.grid.nodes()), cfg);
}

}  // namespace kdiv
