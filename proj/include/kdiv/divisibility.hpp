#pragma once

#include "kdiv/kfunctional.hpp"

#include <string>
#include <vector>

namespace kdiv {

/// z_n with 0 <= z_n <= y_n and sum z_n = y, filled greedily in order.
/// Requires 0 <= y <= sum y_n pointwise.
std::vector<VecXd> riesz_decompose(const VecXd& y, const std::vector<VecXd>& parts);

/// Dyadic blocks of x by the ratio |.|_0 / |.|_1 of its atoms: coordinates
/// of a weighted-l1 element, or level layers (min(|x|, v_j) - v_{j+1})_+
/// for (l^1, l^inf) and (L^1, L^inf).
struct FundamentalSplit {
  int n_min = 0;
  int n_max = -1;
  std::vector<Element> blocks;  // blocks[i] holds ratios in [2^{n_min+i}, 2^{n_min+i+1})
  Element minus_inf;            // atoms with infinite leg-1 norm
  Element plus_inf;             // atoms with infinite leg-0 norm
  VecXd norm0;                  // leg norms of blocks, then -inf, then +inf
  VecXd norm1;
  double epsilon = 0.01;
  /// max over the grid and knots of sum_n min(|y_n|_0, t |y_n|_1) / K(t, x).
  double audit_gamma = 1.0;
  /// audit_gamma <= 2 (1 + epsilon), the bound of the dyadic grouping.
  bool audit_passed = true;
};

FundamentalSplit fundamental_split(const Element& x, const CoupleDescriptor& couple,
                                   double epsilon = 0.01, const KOptions& options = {});

/// Operator norm bound the transfer construction is required to meet.
inline constexpr double kTransferTarget = 4.0;
/// Declared constant of k_divide: pieces satisfy K(., x_i) <= gamma phi_i
/// whenever the transfer operator has norm <= kTransferTarget (the dyadic
/// element contributes a factor 2).
inline constexpr double kDivideGamma = 2.0 * kTransferTarget;

/// Declared constant of p_k_divide for 0 < p < 1:
/// (2^{1/p} + 1) (2^{2-p} kDivideGamma)^{1/p}; kDivideGamma for p = 1.
double p_divide_gamma(double p);

struct DivisibilityCertificate {
  std::vector<Element> pieces;
  std::vector<ConcavePL> majorants;
  VecXd constants;             // c_i = sup_t K(t, x_i) / phi_i(t)
  double residual = 0.0;       // max |sum x_i - x| (|oplus x_i - |x|| when p < 1)
  double gamma_cert = kDivideGamma;
  double gamma_measured = 0.0; // max_i c_i
  double transfer_norm = 0.0;  // operator norm of the transfer map
  std::string transfer = "none";
  double band_upper = 1.0;     // largest K(., b_i) / phi_i from the dyadic elements
  double p = 1.0;
  double quasi_concavity = 1.0;  // max psi_tilde / psi in the p-version
  bool sign_aligned = true;

  /// Reconstruction within tolerance, sign-aligned pieces, all c_i <= gamma_cert.
  [[nodiscard]] bool valid(double tolerance = 1e-12) const;
};

/// Pieces x_i with sum x_i = x, sign(x_i) = sign(x) and K(., x_i) <= c_i phi_i.
/// Supported: weighted l^1 (including (l^1, l^1) with weights), unweighted
/// (l^1, l^inf), (L^1, L^inf). Throws NumericError naming a t where
/// K(t, x) > sum phi_i(t).
DivisibilityCertificate k_divide(const Element& x, const CoupleDescriptor& couple,
                                 const std::vector<ConcavePL>& majorants,
                                 const KOptions& options = {});

/// Version for K(t, x) <= (sum phi_i(t)^p)^{1/p}: runs k_divide on |x|^p in
/// the convexified couple and returns x_i = sign(x) u_i^{1/p}, so that the
/// oplus-sum (sum |x_i|^p)^{1/p} equals |x|. Supported: (l^p, l^inf),
/// (L^p, L^inf) and (l^p(w0), l^p(w1)).
DivisibilityCertificate p_k_divide(const Element& x, const CoupleDescriptor& couple, double p,
                                   const std::vector<ConcavePL>& majorants,
                                   const KOptions& options = {});

/// t -> phi(t^{1/p})^p and its least concave majorant.
ConcavePL convexified_majorant(const ConcavePL& phi, double p);

}  // namespace kdiv
