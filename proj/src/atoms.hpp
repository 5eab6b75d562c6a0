#pragma once

// Decomposition of an element into nonnegative atoms whose K-functionals
// add up exactly: K(t, x) = sum_j min(V_j, t S_j).

#include "kdiv/couple.hpp"

#include <vector>

namespace kdiv::detail {

struct Atomization {
  std::vector<VecXd> parts;  // nonnegative values in the shape of x; sum = |x|
  VecXd V;                   // leg-0 norm of each part (may be inf)
  VecXd S;                   // leg-1 norm of each part (may be inf)
  VecXd sign;                // sign of x per value slot
};

/// Coordinates for weighted l^1 couples, level layers for (l^1, l^inf) and
/// (L^1, L^inf). Throws ValidationError for other couples.
Atomization atomize(const Element& x, const CoupleDescriptor& couple);

/// V / S with inf / finite = inf and finite / inf = 0.
inline double atom_ratio(double v, double s) {
  if (std::isinf(s)) return 0.0;
  if (std::isinf(v)) return kInf;
  return v / s;
}

}  // namespace kdiv::detail
