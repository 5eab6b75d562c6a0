#pragma once

#include "kdiv/kfunctional.hpp"
#include "kdiv/simplex.hpp"

#include <vector>

namespace kdiv {

/// Parameter of the K-method: a weighted l^q over a dyadic grid (the
/// discretized L^q(t^{-theta} w, dt/t)) or an intersection of such.
struct ParameterLattice {
  enum class Kind { WeightedLqDyadic, Intersection };

  Kind kind = Kind::WeightedLqDyadic;
  double q = 2.0;
  double theta = 0.5;
  VecXd weights;  // per grid node; overrides t^{-theta} when nonempty
  Grid grid;
  std::vector<ParameterLattice> members;

  static ParameterLattice lq_dyadic(double q, double theta, Grid grid = {});
  static ParameterLattice weighted(double q, VecXd weights, Grid grid = {});
  static ParameterLattice intersection(std::vector<ParameterLattice> members);

  void validate() const;
  /// Weight of grid node i.
  [[nodiscard]] double node_weight(int i) const;
};

struct ParameterNorm {
  double value = 0.0;
  bool divergent = false;
  /// |value - value on every other node|; a proxy for quadrature error.
  double quadrature_error = 0.0;
};

/// Partial sums above this flag divergence.
inline constexpr double kDivergenceThreshold = 1e12;

/// Samples must sit on E's grid; intersections need one shared grid.
ParameterNorm parameter_norm(const VecXd& samples, const ParameterLattice& E);
/// Samples the curve on each member's own grid.
ParameterNorm parameter_norm(const ConcavePL& f, const ParameterLattice& E);

ParameterNorm k_space_norm(const Element& x, const CoupleDescriptor& couple,
                           const ParameterLattice& E, const KOptions& options = {});

/// (int_0^inf (K(t) t^{-theta})^r dt/t)^{1/r}, or sup_t K(t) t^{-theta} for
/// r = inf, integrated segment by segment on the exact curve.
double lions_peetre_norm(const ConcavePL& k, double theta, double r);
double lions_peetre_norm(const Element& x, const CoupleDescriptor& couple, double theta, double r,
                         const KOptions& options = {});

/// sup_t ky(t) / kx(t), exact for piecewise-linear curves: the sup is taken
/// over the merged knots and both asymptotes.
double orbit_norm(const ConcavePL& ky, const ConcavePL& kx);
double orbit_norm(const Element& y, const CoupleDescriptor& couple_y, const Element& x,
                  const CoupleDescriptor& couple_x, const KOptions& options = {});

/// Configuration of the cover search for the norm of hat X_{p,q}.
struct EHatNorm {
  CoupleDescriptor couple;
  Leg space;           // the lattice X carrying the cover norms
  Eigen::Index dimension = 0;
  double p = 1.0;
  double q = 1.0;
  Grid grid{-10, 10, 2};
  int budget = 64;     // dictionary size cap

  void validate() const;
};

struct CoverElement {
  VecXd x;
  double norm = 0.0;
  ConcavePL k;
};

struct EHatResult {
  double value = 0.0;
  bool covered = true;
  LpStatus status = LpStatus::Optimal;
  std::vector<CoverElement> cover;
};

/// Dictionary of scaled basis vectors and prefix indicators.
std::vector<VecXd> e_hat_dictionary(const EHatNorm& cfg);

/// Upper value of |f| in hat X_{p,q}: the best cover by multiples of
/// dictionary elements with f(t)^p <= sum K(t, x_i)^p on the grid. The
/// linear program in lambda_i^p is optimal for the dictionary when p = q;
/// for q < p its vertex is evaluated with exponent q.
EHatResult e_hat_upper(const ConcavePL& f, const EHatNorm& cfg);
EHatResult e_hat_upper(const VecXd& samples, const EHatNorm& cfg);

}  // namespace kdiv
