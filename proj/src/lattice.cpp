#include "kdiv/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace kdiv {

StepFunction decreasing_rearrangement(const StepFunction& f) {
  const Eigen::Index m = f.pieces();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const VecXd a = f.values().cwiseAbs();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i) > a(j); });
  std::vector<double> breaks{0.0};
  std::vector<double> values;
  for (Eigen::Index i : order) {
    if (a(i) == 0.0) break;
    breaks.push_back(breaks.back() + f.length(i));
    values.push_back(a(i));
  }
  VecXd b = Eigen::Map<VecXd>(breaks.data(), static_cast<Eigen::Index>(breaks.size()));
  VecXd v = Eigen::Map<VecXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return StepFunction(b, v).canonical();
}

VecXd decreasing_rearrangement(const WeightedSeq& x) {
  VecXd a = x.cwiseAbs();
  std::stable_sort(a.begin(), a.end(), std::greater<>());
  return a;
}

ConcavePL least_concave_majorant(const StepFunction& h, std::optional<double> domain_cap) {
  // |h| <= g with g nondecreasing iff g dominates the left corner of each
  // piece, so the hull of those corners (plus the origin) is the majorant.
  std::vector<Point> corners{{0.0, 0.0}};
  for (Eigen::Index i = 0; i < h.pieces(); ++i) {
    if (domain_cap && h.left(i) >= *domain_cap) break;
    corners.push_back({h.left(i), std::abs(h.values()(i))});
  }
  return ConcavePL::upper_hull(std::move(corners), 0.0);
}

Convexified convexify_element(const Element& x, double p, const Leg& space) {
  if (!(p > 0.0)) throw ValidationError("convexify: p must be positive");
  return {x, std::pow(quasi_norm(x, space), 1.0 / p)};
}

Element oplus(const Element& x, const Element& y, double p) {
  if (!(p > 0.0)) throw ValidationError("oplus: p must be positive");
  const VecXd& a = element_values(x);
  const VecXd& b = element_values(y);
  if (a.size() != b.size() || x.index() != y.index()) {
    throw ValidationError("oplus: elements must share their shape");
  }
  VecXd out(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    out(k) = signed_pow(signed_pow(a(k), 1.0 / p) + signed_pow(b(k), 1.0 / p), p);
  }
  return element_with_values(x, out);
}

Element odot(double alpha, const Element& x, double p) {
  if (!(p > 0.0)) throw ValidationError("odot: p must be positive");
  return element_with_values(x, signed_pow(alpha, p) * element_values(x));
}

double pq_convexity_ratio(const Leg& space, const std::vector<VecXd>& family, double p,
                          double q) {
  if (family.empty()) return 0.0;
  const Eigen::Index n = family.front().size();
  VecXd envelope = VecXd::Zero(n);
  double denom = 0.0;
  for (const VecXd& v : family) {
    if (std::isinf(p)) {
      envelope = envelope.cwiseMax(v.cwiseAbs());
    } else {
      envelope += v.cwiseAbs().array().pow(p).matrix();
    }
    denom += std::pow(quasi_norm(v, space), q);
  }
  if (!std::isinf(p)) envelope = envelope.array().pow(1.0 / p).matrix();
  denom = std::pow(denom, 1.0 / q);
  return denom > 0.0 ? quasi_norm(envelope, space) / denom : 0.0;
}

ConvexityEstimate pq_convexity_probe(const Leg& space, Eigen::Index dim, double p, double q,
                                     int budget, std::uint64_t seed) {
  if (budget <= 0) throw ValidationError("pq_convexity_probe: budget must be positive");
  if (!(q > 0.0) || q > p) throw ValidationError("pq_convexity_probe: need 0 < q <= p");
  if (dim <= 0) throw ValidationError("pq_convexity_probe: dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ConvexityEstimate est;
  est.budget = budget;
  est.bound = 1.0;
  est.witness = {VecXd::Unit(dim, 0)};
  auto consider = [&](std::vector<VecXd> family) {
    const double r = pq_convexity_ratio(space, family, p, q);
    if (r > est.bound) {
      est.bound = r;
      est.witness = std::move(family);
    }
  };

  int used = 0;
  // Disjoint spikes and repeated vectors of every size.
  for (Eigen::Index m = 1; m <= dim && used < budget; ++m, ++used) {
    std::vector<VecXd> spikes;
    for (Eigen::Index k = 0; k < m; ++k) spikes.push_back(VecXd::Unit(dim, k));
    consider(std::move(spikes));
    std::vector<VecXd> equal(static_cast<std::size_t>(m), VecXd::Constant(dim, 1.0));
    consider(std::move(equal));
  }
  while (used < budget) {
    ++used;
    const auto m = 1 + static_cast<Eigen::Index>(unif(rng) * static_cast<double>(dim));
    std::vector<VecXd> family;
    for (Eigen::Index k = 0; k < m; ++k) {
      VecXd v(dim);
      const bool spike = unif(rng) < 0.5;
      for (Eigen::Index j = 0; j < dim; ++j) v(j) = spike ? 0.05 * unif(rng) : unif(rng);
      if (spike) v(static_cast<Eigen::Index>(unif(rng) * static_cast<double>(dim))) += 1.0;
      family.push_back(std::move(v));
    }
    consider(std::move(family));
  }
  return est;
}

LConvexityFamily l_convexity_family(const Leg& space, const VecXd& x,
                                    const std::vector<VecXd>& parts) {
  if (parts.empty()) throw ValidationError("l_convexity_family: empty family");
  LConvexityFamily fam;
  VecXd mean = VecXd::Zero(x.size());
  for (const VecXd& v : parts) {
    if ((v.array() < 0.0).any() || (v.array() > x.array()).any()) {
      throw ValidationError("l_convexity_family: need 0 <= x_i <= x");
    }
    mean += v;
    fam.max_norm = std::max(fam.max_norm, quasi_norm(v, space));
  }
  mean /= static_cast<double>(parts.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) > 0.0) fam.averaging_slack = std::max(fam.averaging_slack, 1.0 - mean(k) / x(k));
  }
  return fam;
}

LConvexityEstimate l_convexity_probe(const Leg& space, Eigen::Index dim, int budget,
                                     std::uint64_t seed) {
  if (budget <= 0) throw ValidationError("l_convexity_probe: budget must be positive");
  if (dim <= 0) throw ValidationError("l_convexity_probe: dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  LConvexityEstimate est;
  est.budget = budget;
  auto consider = [&](VecXd x, std::vector<VecXd> parts) {
    const double nx = quasi_norm(x, space);
    if (!(nx > 0.0)) return;
    x /= nx;
    for (VecXd& v : parts) v /= nx;
    const LConvexityFamily fam = l_convexity_family(space, x, parts);
    est.min_max_norm = std::min(est.min_max_norm, fam.max_norm);
    const double eps = std::max(fam.averaging_slack, fam.max_norm);
    if (eps < est.epsilon_upper || est.witness.empty()) {
      est.epsilon_upper = std::min(est.epsilon_upper, eps);
      est.witness = {x};
      est.witness.insert(est.witness.end(), parts.begin(), parts.end());
    }
  };

  int used = 0;
  // Uniform x with one coordinate dropped per part.
  for (Eigen::Index d = 1; d <= dim && used < budget; ++d, ++used) {
    VecXd x = VecXd::Zero(dim);
    x.head(d).setOnes();
    std::vector<VecXd> parts;
    for (Eigen::Index i = 0; i < d; ++i) {
      VecXd v = x;
      if (d > 1) v(i) = 0.0;
      parts.push_back(std::move(v));
    }
    consider(x, std::move(parts));
  }
  while (used < budget) {
    ++used;
    VecXd x(dim);
    for (Eigen::Index k = 0; k < dim; ++k) x(k) = unif(rng);
    const auto n = 2 + static_cast<int>(unif(rng) * 7.0);
    std::vector<VecXd> parts;
    for (int i = 0; i < n; ++i) {
      VecXd v(dim);
      for (Eigen::Index k = 0; k < dim; ++k) {
        v(k) = unif(rng) < 0.3 ? 0.0 : x(k) * (0.5 + 0.5 * unif(rng));
      }
      parts.push_back(std::move(v));
    }
    consider(x, std::move(parts));
  }
  return est;
}

}  // namespace kdiv
