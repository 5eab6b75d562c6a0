#pragma once

// Pointwise-split view of an element against two legs; shared by the
// numeric K engine and the divisibility pipeline.

#include "kdiv/concave_pl.hpp"
#include "kdiv/couple.hpp"

#include <functional>
#include <vector>

namespace kdiv::detail {

/// Active (nonzero) coordinates of an element with per-coordinate measure
/// and leg weights. Leg norms of an amplitude vector a (0 <= a <= mag) are
/// (sum mu_k (w_k a_k)^p)^{1/p} or max_k w_k a_k.
struct PointwiseView {
  std::vector<Eigen::Index> index;  // position in the element's value vector
  VecXd mag;
  VecXd measure;
  VecXd w0;
  VecXd w1;
  double p0 = 1.0;
  double p1 = 1.0;
  Element shape;

  PointwiseView(const Element& x, const Leg& leg0, const Leg& leg1);

  [[nodiscard]] Eigen::Index size() const { return mag.size(); }
  [[nodiscard]] double norm0(const VecXd& a) const { return norm(a, w0, p0, full0); }
  [[nodiscard]] double norm1(const VecXd& a) const { return norm(a, w1, p1, full1); }
  [[nodiscard]] Line line(const VecXd& a) const { return {norm0(a), norm1(mag - a)}; }
  [[nodiscard]] double cost(const VecXd& a, double t) const {
    const double n0 = norm0(a);
    return n0 + (t == 0.0 ? 0.0 : t * norm1(mag - a));
  }

  /// Candidate families are exhaustive (their envelope is K exactly).
  [[nodiscard]] bool exhaustive() const;

  /// Calls visit(a) for every member of the t-independent candidate
  /// families.
  void for_each_candidate(const std::function<void(const VecXd&)>& visit) const;

  /// Element x0 = sign(x) a with the element's shape.
  [[nodiscard]] Element lift(const VecXd& a) const;

 private:
  VecXd full0;  // mu_k (w_k mag_k)^p of a whole coordinate, per leg
  VecXd full1;
  double norm(const VecXd& v, const VecXd& w, double p, const VecXd& full) const;
};

/// Best amplitude vector at t: candidate families, then (unless the
/// families are exhaustive) threshold refinement and coordinate descent.
VecXd minimize_split(const PointwiseView& view, double t, double accuracy);

}  // namespace kdiv::detail
