#include "kdiv/step_function.hpp"

#include <algorithm>
#include <vector>

namespace kdiv {

StepFunction::StepFunction(VecXd breaks, VecXd values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() == values_.size()) {
    // Support starts at 0 implicitly.
    VecXd full(breaks_.size() + 1);
    full(0) = 0.0;
    full.tail(breaks_.size()) = breaks_;
    breaks_ = std::move(full);
  }
  if (breaks_.size() != values_.size() + 1) {
    throw ValidationError("step function: need one more break than values");
  }
  if (breaks_.size() == 0) breaks_ = VecXd::Zero(1);
  if (!(breaks_(0) >= 0.0)) {
    throw ValidationError("step function: breaks must be nonnegative");
  }
  for (Eigen::Index i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_(i + 1) > breaks_(i)) || !std::isfinite(breaks_(i + 1))) {
      throw ValidationError(
          "step function: breaks must be finite and strictly increasing");
    }
  }
  if (!values_.allFinite()) {
    throw ValidationError("step function: values must be finite");
  }
}

StepFunction StepFunction::from_sequence(const VecXd& x) {
  VecXd breaks(x.size() + 1);
  for (Eigen::Index k = 0; k <= x.size(); ++k) breaks(k) = static_cast<double>(k);
  return {breaks, x};
}

VecXd StepFunction::lengths() const {
  return breaks_.tail(values_.size()) - breaks_.head(values_.size());
}

double StepFunction::operator()(double t) const {
  if (values_.size() == 0 || !(t > breaks_(0)) || t > breaks_(values_.size())) {
    return 0.0;
  }
  // First break >= t; the piece is the one ending there.
  const auto* begin = breaks_.data();
  const auto* it = std::lower_bound(begin, begin + breaks_.size(), t);
  return values_(static_cast<Eigen::Index>(it - begin) - 1);
}

double StepFunction::support_measure() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (values_(i) != 0.0) m += length(i);
  }
  return m;
}

StepFunction StepFunction::with_values(VecXd values) const {
  return {breaks_, std::move(values)};
}

StepFunction StepFunction::canonical() const {
  std::vector<double> b{breaks_(0)};
  std::vector<double> v;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!v.empty() && v.back() == values_(i)) {
      b.back() = right(i);
    } else {
      v.push_back(values_(i));
      b.push_back(right(i));
    }
  }
  // Trim zero pieces at the ends.
  std::size_t lo = 0;
  std::size_t hi = v.size();
  while (lo < hi && v[lo] == 0.0) ++lo;
  while (hi > lo && v[hi - 1] == 0.0) --hi;
  if (lo == hi) return {};
  VecXd breaks(static_cast<Eigen::Index>(hi - lo + 1));
  VecXd values(static_cast<Eigen::Index>(hi - lo));
  for (std::size_t i = lo; i <= hi; ++i) breaks(static_cast<Eigen::Index>(i - lo)) = b[i];
  for (std::size_t i = lo; i < hi; ++i) values(static_cast<Eigen::Index>(i - lo)) = v[i];
  return {breaks, values};
}

bool StepFunction::is_zero() const {
  return values_.size() == 0 || values_.isZero(0.0);
}

}  // namespace kdiv
