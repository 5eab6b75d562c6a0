#pragma once

#include "kdiv/concave_pl.hpp"
#include "kdiv/couple.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace kdiv {

/// Nonincreasing rearrangement of |f| laid out from 0. Equal values keep
/// their original order.
StepFunction decreasing_rearrangement(const StepFunction& f);
/// |x| sorted in nonincreasing order.
VecXd decreasing_rearrangement(const WeightedSeq& x);

/// Least concave majorant of |h| on (0, inf), i.e. K(., h) for the couple
/// (L^inf, L^inf(1/t)). With a cap only the part of h on (0, cap] is used.
ConcavePL least_concave_majorant(const StepFunction& h,
                                 std::optional<double> domain_cap = std::nullopt);

/// x viewed in the p-convexification X^{(p)}, where |||x||| = |x|_X^{1/p}.
struct Convexified {
  Element element;
  double norm = 0.0;
};

Convexified convexify_element(const Element& x, double p, const Leg& space);

/// (x^{1/p} + y^{1/p})^p pointwise, with signed powers. x and y must share
/// their shape.
Element oplus(const Element& x, const Element& y, double p);
/// alpha^p . x with alpha^p = |alpha|^p sign(alpha).
Element odot(double alpha, const Element& x, double p);

/// One-sided estimate of a lattice convexity constant.
struct ConvexityEstimate {
  double bound = 1.0;
  std::vector<VecXd> witness;
  int budget = 0;
};

/// Lower bound on the (p, q)-convexity constant of the space `space`
/// restricted to R^dim, from structured and random families. Never an upper
/// bound. Requires 0 < q <= p.
ConvexityEstimate pq_convexity_probe(const Leg& space, Eigen::Index dim, double p, double q,
                                     int budget, std::uint64_t seed = 0);

/// Ratio |(sum |x_k|^p)^{1/p}| / (sum |x_k|^q)^{1/q} for one family.
double pq_convexity_ratio(const Leg& space, const std::vector<VecXd>& family, double p,
                          double q);

/// L-convexity probe. For a family x, x_1..x_n with |x| = 1 and
/// 0 <= x_i <= x, averaging_slack is the least d with mean(x_i) >= (1-d) x.
/// Any admissible epsilon satisfies epsilon < d or epsilon <= max_i |x_i|,
/// so min over families of max(d, max_i |x_i|) bounds it from above.
struct LConvexityEstimate {
  double epsilon_upper = 1.0;
  double min_max_norm = 1.0;
  std::vector<VecXd> witness;  // x followed by x_1..x_n
  int budget = 0;
};

struct LConvexityFamily {
  double averaging_slack = 0.0;
  double max_norm = 0.0;
};

LConvexityFamily l_convexity_family(const Leg& space, const VecXd& x,
                                    const std::vector<VecXd>& parts);

LConvexityEstimate l_convexity_probe(const Leg& space, Eigen::Index dim, int budget,
                                     std::uint64_t seed = 0);

/// (Delta norm, Sigma norm) = (max of the leg norms, K(1, x)).
std::pair<double, double> delta_sigma_norms(const Element& x, const CoupleDescriptor& couple);

}  // namespace kdiv
