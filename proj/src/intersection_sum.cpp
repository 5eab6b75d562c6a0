#include "kdiv/kfunctional.hpp"
#include "kdiv/lattice.hpp"

namespace kdiv {

std::pair<double, double> delta_sigma_norms(const Element& x, const CoupleDescriptor& couple) {
  couple.validate();
  couple.validate_element(x);
  const double delta = std::max(quasi_norm(x, couple.leg0()), quasi_norm(x, couple.leg1()));
  return {delta, k_curve(x, couple)(1.0)};
}

}  // namespace kdiv
