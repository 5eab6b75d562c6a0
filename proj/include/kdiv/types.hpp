#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace kdiv {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecXd = VecX<double>;
using MatXd = MatX<double>;

/// A finite real vector; elements of sequence couples.
using WeightedSeq = VecXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown for malformed input (exit status 2 in the CLI).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation cannot complete: violated hypothesis, LP
/// iteration limit, infeasible transport (exit status 3 in the CLI).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |v|^p sign(v).
inline double signed_pow(double v, double p) {
  return std::copysign(std::pow(std::abs(v), p), v);
}

/// Dyadic sampling grid 2^{min_exp} .. 2^{max_exp}, per_octave nodes per
/// factor of two.
struct Grid {
  int min_exp = -20;
  int max_exp = 20;
  int per_octave = 4;

  [[nodiscard]] int size() const { return (max_exp - min_exp) * per_octave + 1; }
  [[nodiscard]] double node(int i) const {
    return std::exp2(static_cast<double>(min_exp) +
                     static_cast<double>(i) / per_octave);
  }
  [[nodiscard]] VecXd nodes() const {
    VecXd t(size());
    for (int i = 0; i < size(); ++i) t(i) = node(i);
    return t;
  }
  /// Quadrature weight of each node for integrals in dt/t (midpoint rule in
  /// log scale).
  [[nodiscard]] double log_step() const { return std::log(2.0) / per_octave; }

  void validate() const {
    if (per_octave <= 0 || max_exp < min_exp) {
      throw ValidationError("grid: need per_octave > 0 and max_exp >= min_exp");
    }
  }
};

}  // namespace kdiv
