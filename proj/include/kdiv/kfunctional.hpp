#pragma once

#include "kdiv/concave_pl.hpp"
#include "kdiv/couple.hpp"

#include <optional>
#include <string>
#include <utility>

namespace kdiv {

enum class KMethod { ExactWeightedL1, ExactL1Linf, ExactHull, Numeric };

std::string to_string(KMethod m);

/// K(., x) for one element of a couple.
struct KCurve {
  ConcavePL curve;
  CoupleDescriptor couple;
  Element element;
  KMethod method = KMethod::Numeric;
  /// Relative accuracy of curve values; 0 for closed forms and for
  /// exhaustive candidate families.
  double accuracy = 0.0;

  [[nodiscard]] double operator()(double t) const { return curve(t); }
};

/// A decomposition x = x0 + x1 realizing norm0 + t * norm1.
struct SplitWitness {
  Element x0;
  Element x1;
  double norm0 = 0.0;
  double norm1 = 0.0;
  double objective = 0.0;
  double t = 1.0;
};

struct KValue {
  double value = 0.0;
  SplitWitness witness;
};

/// sum_n |x_n| min(w0_n, t w1_n). A coordinate with both weights infinite
/// must vanish.
double k_weighted_l1(const VecXd& x, const VecXd& w0, const VecXd& w1, double t);
KCurve k_exact_weighted_l1(const VecXd& x, const VecXd& w0, const VecXd& w1);

/// K(t, f; L^1, L^inf) = int_0^t f*(s) ds.
KCurve k_exact_l1_linf(const StepFunction& f);
/// Counting-measure version: partial sums of x* interpolated linearly.
KCurve k_exact_l1_linf(const WeightedSeq& x);

/// K(t, h; L^inf, L^inf(1/t)): the least concave majorant of |h|.
KCurve k_exact_linfty_couple(const StepFunction& h);

/// Upper value of K(t, x) for SequenceLp / FunctionLp couples over
/// sign-aligned pointwise splits: truncation families, exhaustive vertex
/// enumeration where the objective is concave, then cyclic coordinate
/// descent. The witness reproduces the value.
KValue k_numeric(const Element& x, const CoupleDescriptor& couple, double t,
                 double accuracy = 1e-9);

/// Same optimizer for an arbitrary pair of legs (no ordering of exponents
/// required).
KValue k_pointwise(const Element& x, const Leg& leg0, const Leg& leg1, double t,
                   double accuracy = 1e-9);

/// Full curve from the pointwise optimizer: the lower envelope of every
/// split line found on the grid. Concave by construction; exact for all t
/// when the candidate family is exhaustive.
KCurve k_pointwise_curve(const Element& x, const Leg& leg0, const Leg& leg1, const Grid& grid,
                         double accuracy = 1e-9);

struct KOptions {
  Grid grid;
  double accuracy = 1e-9;
};

/// Dispatches to the closed form when one exists for the couple.
KCurve k_curve(const Element& x, const CoupleDescriptor& couple, const KOptions& options = {});

/// Element of B = (l^1(v0), l^1(v1)) over {-inf} u [n_min, n_max] u {+inf}
/// with v0 = (1, 1, ..., 1, inf) and v1 = (inf, 2^{-n}, ..., 1), whose
/// K-functional is equivalent to a given Conv function.
struct DyadicElement {
  int n_min = 0;
  int n_max = -1;
  double alpha = 0.0;  // mass of the -inf atom
  double beta = 0.0;   // mass of the +inf atom
  VecXd b;             // b(i) sits at n = n_min + i

  [[nodiscard]] int atoms() const { return static_cast<int>(b.size()) + 2; }
  /// Coordinates in atom order (-inf, n_min..n_max, +inf).
  [[nodiscard]] VecXd entries() const;
  [[nodiscard]] VecXd weights0() const;
  [[nodiscard]] VecXd weights1() const;
  /// alpha + beta t + sum_n b_n min(1, t 2^{-n}).
  [[nodiscard]] ConcavePL k_curve() const;
};

struct ConvElement {
  DyadicElement element;
  /// Measured band lower <= K(t, b) / phi(t) <= upper over the knots of
  /// both curves inside [2^{n_min}, 2^{n_max + 1}].
  double band_lower = 1.0;
  double band_upper = 1.0;
};

/// phi = alpha + beta t + phi0 with phi0 in Conv0; each slope drop of phi0
/// at s is moved to the dyadic node 2^n <= s < 2^{n+1}. When the range
/// covers every knot, phi <= K(., b) <= 2 phi. Without a range the range
/// spanned by the knots is used.
ConvElement conv_to_element(const ConcavePL& phi, std::optional<std::pair<int, int>> range = {});

}  // namespace kdiv
