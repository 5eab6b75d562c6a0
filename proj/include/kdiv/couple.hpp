#pragma once

#include "kdiv/step_function.hpp"
#include "kdiv/types.hpp"

#include <string>
#include <variant>

namespace kdiv {

/// A lattice element: a finite sequence or a step function on (0, inf).
using Element = std::variant<WeightedSeq, StepFunction>;

enum class CoupleKind { SequenceLp, FunctionLp, WeightedL1, LInftyCouple };

/// One space of a couple.
///
/// Sequences: |x| = (sum_k (w_k |x_k|)^p)^{1/p}, or max_k w_k |x_k| for
/// p = inf; an empty weight vector means w = 1. Functions: (int |f|^p)^{1/p}
/// or ess-sup, optionally against the weight 1/t (used by L^inf(1/t)).
struct Leg {
  double exponent = 1.0;
  VecXd weights;
  bool inverse_t_weight = false;
};

/// Tagged description of a supported couple (X0, X1).
struct CoupleDescriptor {
  CoupleKind kind = CoupleKind::SequenceLp;
  double p = 1.0;
  double q = kInf;
  VecXd w0;  // empty: unweighted
  VecXd w1;

  static CoupleDescriptor sequence_lp(double p, double q, VecXd w0 = {}, VecXd w1 = {});
  static CoupleDescriptor function_lp(double p, double q);
  static CoupleDescriptor weighted_l1(VecXd w0, VecXd w1);
  static CoupleDescriptor linfty_couple();

  /// Checks exponents and weights; throws ValidationError.
  void validate() const;
  /// Checks that x lives in the ambient space of the couple (kind and
  /// dimension); throws ValidationError.
  void validate_element(const Element& x) const;

  [[nodiscard]] Leg leg0() const;
  [[nodiscard]] Leg leg1() const;
  [[nodiscard]] Leg leg(int i) const { return i == 0 ? leg0() : leg1(); }
  [[nodiscard]] bool is_sequence() const {
    return kind == CoupleKind::SequenceLp || kind == CoupleKind::WeightedL1;
  }
  [[nodiscard]] std::string tag() const;
};

/// Quasi-norm of x in one leg. Returns +inf when an infinite weight meets
/// a nonzero entry.
double quasi_norm(const Element& x, const Leg& leg);
double quasi_norm(const WeightedSeq& x, const Leg& leg);
double quasi_norm(const StepFunction& f, const Leg& leg);

/// Unweighted l^p quasi-norm.
inline double lp_norm(const WeightedSeq& x, double p) { return quasi_norm(x, Leg{p, {}, false}); }

/// Max(1, 2^{(1-p)/p}): the quasi-triangle constant of l^p and L^p.
double quasi_triangle_constant(double p);

/// Pointwise helpers over both element kinds.
Element element_abs(const Element& x);
bool element_is_zero(const Element& x);
Eigen::Index element_size(const Element& x);
/// Values of the element (sequence entries or piece values).
const VecXd& element_values(const Element& x);
/// Element with the same shape carrying new values.
Element element_with_values(const Element& x, VecXd values);

}  // namespace kdiv
