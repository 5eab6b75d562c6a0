#pragma once

#include "kdiv/types.hpp"

namespace kdiv {

/// Finitely supported step function on (0, inf).
///
/// Equals values(i) on (breaks(i), breaks(i+1)] and 0 elsewhere. breaks has
/// one more entry than values, breaks(0) >= 0, and breaks is strictly
/// increasing.
class StepFunction {
 public:
  StepFunction() : breaks_(VecXd::Zero(1)) {}
  StepFunction(VecXd breaks, VecXd values);

  /// Builds the counting-measure analogue of a sequence: x(k) on (k, k+1].
  static StepFunction from_sequence(const VecXd& x);

  [[nodiscard]] const VecXd& breaks() const { return breaks_; }
  [[nodiscard]] const VecXd& values() const { return values_; }
  [[nodiscard]] Eigen::Index pieces() const { return values_.size(); }

  [[nodiscard]] double left(Eigen::Index i) const { return breaks_(i); }
  [[nodiscard]] double right(Eigen::Index i) const { return breaks_(i + 1); }
  [[nodiscard]] double length(Eigen::Index i) const {
    return breaks_(i + 1) - breaks_(i);
  }
  [[nodiscard]] VecXd lengths() const;

  [[nodiscard]] double operator()(double t) const;

  /// Measure of the support {f != 0}.
  [[nodiscard]] double support_measure() const;

  /// Same function, same breaks, new piece values.
  [[nodiscard]] StepFunction with_values(VecXd values) const;

  /// Canonical form: adjacent equal values merged, zero pieces at both ends
  /// dropped.
  [[nodiscard]] StepFunction canonical() const;

  [[nodiscard]] bool is_zero() const;

 private:
  VecXd breaks_;
  VecXd values_;
};

}  // namespace kdiv
