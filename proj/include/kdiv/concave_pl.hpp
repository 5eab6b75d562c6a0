#pragma once

#include "kdiv/types.hpp"

#include <span>
#include <vector>

namespace kdiv {

/// Affine function value + slope * t; every split x = x0 + x1 of an element
/// gives one, with value = |x0|_0 and slope = |x1|_1.
struct Line {
  double value = 0.0;
  double slope = 0.0;

  [[nodiscard]] double operator()(double t) const { return value + slope * t; }
};

struct Point {
  double t = 0.0;
  double y = 0.0;
};

/// Piecewise-linear, nondecreasing, concave function on (0, inf).
///
/// Knots (t_i, y_i) with t_0 = 0; y_0 is the limit at 0+ (a jump at the
/// origin is allowed, so Conv elements with f(0+) > 0 are representable).
/// Linear between knots, slope terminal_slope after the last knot.
class ConcavePL {
 public:
  static constexpr double kMergeTolerance = 1e-12;

  ConcavePL() : t_(VecXd::Zero(1)), y_(VecXd::Zero(1)) {}
  ConcavePL(VecXd t, VecXd y, double terminal_slope);

  /// alpha + beta * t.
  static ConcavePL affine(double alpha, double beta);

  /// Smallest concave nondecreasing function on (0, inf) with slope
  /// terminal_slope at infinity that dominates every point. Points at t = 0
  /// bound the limit at 0+.
  static ConcavePL upper_hull(std::vector<Point> points, double terminal_slope,
                              double merge_tolerance = kMergeTolerance);

  /// Pointwise minimum of lines with nonnegative value and slope.
  static ConcavePL lower_envelope(std::span<const Line> lines);

  /// sum_k min(a_k, b_k t) with a_k, b_k in [0, inf]; an infinite entry
  /// leaves only the other term.
  static ConcavePL sum_of_mins(const VecXd& a, const VecXd& b);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] VecXd operator()(const VecXd& t) const;

  [[nodiscard]] const VecXd& knots_t() const { return t_; }
  [[nodiscard]] const VecXd& knots_y() const { return y_; }
  [[nodiscard]] double terminal_slope() const { return terminal_slope_; }
  [[nodiscard]] double value_at_zero() const { return y_(0); }
  /// Slope just to the right of 0.
  [[nodiscard]] double initial_slope() const;
  /// Slope of segment i (between knots i and i+1); terminal slope for the
  /// last index.
  [[nodiscard]] double segment_slope(Eigen::Index i) const;
  /// lim_{t -> inf} f(t); infinite when the terminal slope is positive.
  [[nodiscard]] double limit_at_infinity() const;

  /// Nonnegative, nondecreasing and concave within slack.
  [[nodiscard]] bool is_conv(double slack = 1e-9) const;
  /// Conv element with f(0+) = 0 and zero terminal slope.
  [[nodiscard]] bool is_conv0() const;
  /// Smallest margin of the concavity / monotonicity / positivity checks
  /// (negative means violated).
  [[nodiscard]] double validation_margin() const;

  [[nodiscard]] ConcavePL scaled(double lambda) const;
  [[nodiscard]] ConcavePL operator+(const ConcavePL& other) const;

  /// Knots merged with collinear interior knots removed.
  [[nodiscard]] ConcavePL simplified(double merge_tolerance = kMergeTolerance) const;

 private:
  VecXd t_;
  VecXd y_;
  double terminal_slope_ = 0.0;
};

/// Sorted union of the knot abscissae of both curves (t = 0 excluded).
VecXd merged_knots(const ConcavePL& a, const ConcavePL& b);

}  // namespace kdiv
