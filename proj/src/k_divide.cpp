#include "atoms.hpp"
#include "kdiv/divisibility.hpp"
#include "kdiv/kmethod.hpp"
#include "kdiv/lattice.hpp"
#include "kdiv/simplex.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace kdiv {

double p_divide_gamma(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p_divide_gamma: p must lie in (0, 1]");
  if (p == 1.0) return kDivideGamma;
  return (std::exp2(1.0 / p) + 1.0) * std::pow(std::exp2(2.0 - p) * kDivideGamma, 1.0 / p);
}

bool DivisibilityCertificate::valid(double tolerance) const {
  if (!(residual <= tolerance) || !sign_aligned) return false;
  for (Eigen::Index i = 0; i < constants.size(); ++i) {
    if (!(constants(i) <= gamma_cert * (1.0 + 1e-9))) return false;
  }
  return true;
}

namespace {

/// Capacities of the transfer problem: atom k of the dyadic element can
/// absorb V-mass up to M cap0(k) and S-mass up to M cap1(k).
struct Capacities {
  VecXd cap0;
  VecXd cap1;
  VecXd position;  // cap0 / cap1
};

/// Fraction f(j, k) of atom j of x drawn from atom k of b.
using Flow = MatXd;

bool allowed(double v, double s, double c0, double c1) {
  return !(std::isinf(v) && std::isfinite(c0)) && !(std::isinf(s) && std::isfinite(c1));
}

/// Largest load factor of the flow against the capacities.
double flow_norm(const detail::Atomization& a, const Capacities& c, const Flow& f) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < f.cols(); ++k) {
    double u0 = 0.0;
    double u1 = 0.0;
    for (Eigen::Index j = 0; j < f.rows(); ++j) {
      if (f(j, k) == 0.0) continue;
      if (std::isfinite(c.cap0(k))) u0 += f(j, k) * a.V(j);
      if (std::isfinite(c.cap1(k))) u1 += f(j, k) * a.S(j);
    }
    if (u0 > 0.0) m = std::max(m, u0 / c.cap0(k));
    if (u1 > 0.0) m = std::max(m, u1 / c.cap1(k));
  }
  return m;
}

/// Nearest-block matching in order of position: each atom of x first takes
/// from atoms of b at or below its own ratio (nearest first), then from
/// atoms above it, within capacity factor g.
std::optional<Flow> greedy_transfer(const detail::Atomization& a, const Capacities& c, double g) {
  const Eigen::Index n = a.V.size();
  const Eigen::Index m = c.cap0.size();
  VecXd rem0 = g * c.cap0;
  VecXd rem1 = g * c.cap1;
  Flow f = Flow::Zero(n, m);
  std::vector<Eigen::Index> coords(static_cast<std::size_t>(n));
  std::iota(coords.begin(), coords.end(), Eigen::Index{0});
  VecXd rho(n);
  for (Eigen::Index j = 0; j < n; ++j) rho(j) = detail::atom_ratio(a.V(j), a.S(j));
  std::stable_sort(coords.begin(), coords.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return rho(i) < rho(j); });
  for (Eigen::Index j : coords) {
    std::vector<Eigen::Index> order;
    for (Eigen::Index k = m; k-- > 0;) {
      if (c.position(k) <= rho(j)) order.push_back(k);
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (c.position(k) > rho(j)) order.push_back(k);
    }
    double r = 1.0;
    for (Eigen::Index k : order) {
      if (!allowed(a.V(j), a.S(j), rem0(k), rem1(k))) continue;
      double take = r;
      if (std::isfinite(rem0(k))) take = std::min(take, rem0(k) / a.V(j));
      if (std::isfinite(rem1(k))) take = std::min(take, rem1(k) / a.S(j));
      if (!(take > 0.0)) continue;
      f(j, k) += take;
      r -= take;
      if (std::isfinite(rem0(k))) rem0(k) = std::max(0.0, rem0(k) - take * a.V(j));
      if (std::isfinite(rem1(k))) rem1(k) = std::max(0.0, rem1(k) - take * a.S(j));
      if (r <= 1e-14) break;
    }
    if (r > 1e-12) return std::nullopt;
    f.row(j) /= f.row(j).sum();
  }
  return f;
}

/// Minimum-norm flow by linear programming.
Flow lp_transfer(const detail::Atomization& a, const Capacities& c) {
  const Eigen::Index n = a.V.size();
  const Eigen::Index m = c.cap0.size();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> vars;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      if (allowed(a.V(j), a.S(j), c.cap0(k), c.cap1(k))) vars.emplace_back(j, k);
    }
  }
  const std::size_t nv = vars.size() + 1;  // last variable: the norm M
  DenseSimplex<double> lp(nv);
  std::vector<double> obj(nv, 0.0);
  obj.back() = 1.0;
  lp.set_objective(obj);
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (vars[v].first == j) row[v] = 1.0;
    }
    lp.add_constraint(std::move(row), Relation::Equal, 1.0);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    for (int leg = 0; leg < 2; ++leg) {
      const double cap = leg == 0 ? c.cap0(k) : c.cap1(k);
      if (!std::isfinite(cap)) continue;
      std::vector<double> row(nv, 0.0);
      bool used = false;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].second != k) continue;
        row[v] = (leg == 0 ? a.V(vars[v].first) : a.S(vars[v].first)) / cap;
        used = true;
      }
      if (!used) continue;
      row.back() = -1.0;
      lp.add_constraint(std::move(row), Relation::LessEq, 0.0);
    }
  }
  const LpResult<double> res = lp.solve();
  if (res.status != LpStatus::Optimal) {
    throw NumericError(std::string("k_divide: transfer program ") + to_string(res.status));
  }
  Flow f = Flow::Zero(n, m);
  for (std::size_t v = 0; v < vars.size(); ++v) f(vars[v].first, vars[v].second) = std::max(0.0, res.x[v]);
  for (Eigen::Index j = 0; j < n; ++j) f.row(j) /= f.row(j).sum();
  return f;
}

std::string describe_t(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

/// Throws NumericError at the first t where K(t, x) > bound(t).
void check_hypothesis(const ConcavePL& kx, const std::function<double(double)>& bound,
                      const std::vector<double>& probes, const char* what) {
  for (double t : probes) {
    const double k = kx(t);
    const double b = bound(t);
    if (k > b * (1.0 + 1e-9) + 1e-300) {
      throw NumericError(std::string(what) + " fails at t = " + describe_t(t) + " (K = " +
                         describe_t(k) + ", bound = " + describe_t(b) + ")");
    }
  }
}

std::vector<double> probe_points(const ConcavePL& kx, const std::vector<ConcavePL>& phis,
                                 const Grid& grid) {
  std::vector<double> t;
  for (Eigen::Index i = 1; i < kx.knots_t().size(); ++i) t.push_back(kx.knots_t()(i));
  for (const ConcavePL& f : phis) {
    for (Eigen::Index i = 1; i < f.knots_t().size(); ++i) t.push_back(f.knots_t()(i));
  }
  for (int i = 0; i < grid.size(); ++i) t.push_back(grid.node(i));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

double piece_constant(const ConcavePL& k, const ConcavePL& phi, bool piece_zero) {
  if (piece_zero) return 0.0;
  if (phi.knots_y().isZero(0.0) && phi.terminal_slope() == 0.0) return kInf;
  return orbit_norm(k, phi);
}

void check_majorants(const std::vector<ConcavePL>& majorants) {
  if (majorants.empty()) throw ValidationError("k_divide: no majorants");
  for (const ConcavePL& phi : majorants) {
    if (!phi.is_conv()) throw ValidationError("k_divide: majorant is not in Conv");
  }
}

}  // namespace

DivisibilityCertificate k_divide(const Element& x, const CoupleDescriptor& couple,
                                 const std::vector<ConcavePL>& majorants, const KOptions& options) {
  check_majorants(majorants);
  const detail::Atomization atoms = detail::atomize(x, couple);
  const ConcavePL kx = k_curve(x, couple, options).curve;
  ConcavePL total = majorants.front();
  for (std::size_t i = 1; i < majorants.size(); ++i) total = total + majorants[i];

  // Hypothesis K(., x) <= sum phi_i, at knots, grid and both asymptotes.
  check_hypothesis(kx, [&](double t) { return total(t); }, probe_points(kx, majorants, options.grid),
                   "hypothesis K(t, x) <= sum phi_i(t)");
  if (kx.value_at_zero() > total.value_at_zero() * (1.0 + 1e-9) ||
      (kx.value_at_zero() == 0.0 && total.value_at_zero() == 0.0 &&
       kx.initial_slope() > total.initial_slope() * (1.0 + 1e-9))) {
    throw NumericError("hypothesis K(t, x) <= sum phi_i(t) fails as t -> 0");
  }
  if (kx.terminal_slope() > total.terminal_slope() * (1.0 + 1e-9) ||
      (total.terminal_slope() == 0.0 &&
       kx.limit_at_infinity() > total.limit_at_infinity() * (1.0 + 1e-9))) {
    throw NumericError("hypothesis K(t, x) <= sum phi_i(t) fails as t -> inf");
  }

  DivisibilityCertificate cert;
  cert.majorants = majorants;
  const std::size_t N = majorants.size();
  const VecXd& xv = element_values(x);
  const Eigen::Index nslots = xv.size();
  cert.constants = VecXd::Zero(static_cast<Eigen::Index>(N));

  if (atoms.parts.empty()) {
    for (std::size_t i = 0; i < N; ++i) cert.pieces.push_back(element_with_values(x, VecXd::Zero(nslots)));
    return cert;
  }

  // Dyadic elements on one shared range.
  int lo = std::numeric_limits<int>::max();
  int hi = std::numeric_limits<int>::min();
  for (const ConcavePL& phi : majorants) {
    for (Eigen::Index i = 1; i < phi.knots_t().size(); ++i) {
      const int n = static_cast<int>(std::floor(std::log2(phi.knots_t()(i))));
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  }
  std::vector<DyadicElement> b;
  for (const ConcavePL& phi : majorants) {
    const ConvElement ce = hi >= lo ? conv_to_element(phi, std::make_pair(lo, hi)) : conv_to_element(phi);
    cert.band_upper = std::max(cert.band_upper, ce.band_upper);
    b.push_back(ce.element);
  }
  VecXd entries = VecXd::Zero(b.front().atoms());
  for (const DyadicElement& e : b) entries += e.entries();
  const VecXd v0 = b.front().weights0();
  const VecXd v1 = b.front().weights1();

  // Normalize b so that K(., b) touches K(., x); the transfer problem is
  // then invariant under scaling of the majorants.
  DyadicElement sum_b = b.front();
  sum_b.alpha = entries(0);
  sum_b.b = entries.segment(1, entries.size() - 2);
  sum_b.beta = entries(entries.size() - 1);
  const double r = 1.0 / orbit_norm(kx, sum_b.k_curve());

  std::vector<Eigen::Index> live;
  for (Eigen::Index k = 0; k < entries.size(); ++k) {
    if (entries(k) > 0.0) live.push_back(k);
  }
  Capacities cap;
  const auto nl = static_cast<Eigen::Index>(live.size());
  cap.cap0.resize(nl);
  cap.cap1.resize(nl);
  cap.position.resize(nl);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const Eigen::Index k = live[static_cast<std::size_t>(i)];
    cap.cap0(i) = std::isinf(v0(k)) ? kInf : entries(k) * v0(k) / r;
    cap.cap1(i) = std::isinf(v1(k)) ? kInf : entries(k) * v1(k) / r;
    cap.position(i) = detail::atom_ratio(cap.cap0(i), cap.cap1(i));
  }

  std::optional<Flow> flow;
  for (double g = 1.0; g <= kTransferTarget && !flow; g *= 2.0) {
    flow = greedy_transfer(atoms, cap, g);
    if (flow) cert.transfer = "greedy";
  }
  if (!flow) {
    flow = lp_transfer(atoms, cap);
    cert.transfer = "lp";
  }
  cert.transfer_norm = flow_norm(atoms, cap, *flow) / r;

  // Pieces x_i = sum_j share(i, j) sign(x) part_j with share from b_i / b.
  const auto nj = static_cast<Eigen::Index>(atoms.parts.size());
  MatXd share = MatXd::Zero(static_cast<Eigen::Index>(N), nj);
  for (std::size_t i = 0; i < N; ++i) {
    const VecXd bi = b[i].entries();
    for (Eigen::Index j = 0; j < nj; ++j) {
      for (Eigen::Index l = 0; l < nl; ++l) {
        const Eigen::Index k = live[static_cast<std::size_t>(l)];
        share(static_cast<Eigen::Index>(i), j) += (*flow)(j, l) * bi(k) / entries(k);
      }
    }
  }
  for (Eigen::Index j = 0; j < nj; ++j) share.col(j) /= share.col(j).sum();

  VecXd recon = VecXd::Zero(nslots);
  for (std::size_t i = 0; i < N; ++i) {
    VecXd piece = VecXd::Zero(nslots);
    for (Eigen::Index j = 0; j < nj; ++j) {
      piece += share(static_cast<Eigen::Index>(i), j) * atoms.parts[static_cast<std::size_t>(j)];
    }
    piece = piece.cwiseProduct(atoms.sign);
    recon += piece;
    const Element e = element_with_values(x, piece);
    const bool zero = element_is_zero(e);
    const ConcavePL kp = zero ? ConcavePL() : k_curve(e, couple, options).curve;
    cert.constants(static_cast<Eigen::Index>(i)) = piece_constant(kp, majorants[i], zero);
    if ((piece.cwiseProduct(atoms.sign).array() < 0.0).any()) cert.sign_aligned = false;
    for (Eigen::Index k = 0; k < nslots; ++k) {
      if (atoms.sign(k) == 0.0 && piece(k) != 0.0) cert.sign_aligned = false;
    }
    cert.pieces.push_back(e);
  }
  cert.residual = (recon - xv).cwiseAbs().maxCoeff() / std::max(xv.cwiseAbs().maxCoeff(), 1e-300);
  cert.gamma_measured = cert.constants.maxCoeff();
  return cert;
}

ConcavePL convexified_majorant(const ConcavePL& phi, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("convexified majorant: p must lie in (0, 1]");
  if (!phi.is_conv()) throw ValidationError("convexified majorant: function is not in Conv");
  // t -> phi(t^{1/p})^p is convex between images of knots, so the hull of
  // the knot images is its least concave majorant.
  std::vector<Point> pts{{0.0, std::pow(phi.value_at_zero(), p)}};
  for (Eigen::Index i = 1; i < phi.knots_t().size(); ++i) {
    pts.push_back({std::pow(phi.knots_t()(i), p), std::pow(phi.knots_y()(i), p)});
  }
  return ConcavePL::upper_hull(std::move(pts), std::pow(phi.terminal_slope(), p));
}

DivisibilityCertificate p_k_divide(const Element& x, const CoupleDescriptor& couple, double p,
                                   const std::vector<ConcavePL>& majorants, const KOptions& options) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p_k_divide: p must lie in (0, 1]");
  couple.validate();
  couple.validate_element(x);
  check_majorants(majorants);
  if (p == 1.0) return k_divide(x, couple, majorants, options);

  CoupleDescriptor convex;
  const bool unweighted = couple.w0.size() == 0 && couple.w1.size() == 0;
  if (couple.kind == CoupleKind::SequenceLp && couple.p == p && std::isinf(couple.q) && unweighted) {
    convex = CoupleDescriptor::sequence_lp(1.0, kInf);
  } else if (couple.kind == CoupleKind::FunctionLp && couple.p == p && std::isinf(couple.q)) {
    convex = CoupleDescriptor::function_lp(1.0, kInf);
  } else if (couple.kind == CoupleKind::SequenceLp && couple.p == p && couple.q == p) {
    const Eigen::Index n = element_size(x);
    const VecXd w0 = couple.w0.size() != 0 ? couple.w0 : VecXd::Ones(n);
    const VecXd w1 = couple.w1.size() != 0 ? couple.w1 : VecXd::Ones(n);
    convex = CoupleDescriptor::weighted_l1(w0.array().pow(p).matrix(), w1.array().pow(p).matrix());
  } else {
    throw ValidationError("p_k_divide: couple must be (l^p, l^inf), (L^p, L^inf) or (l^p(w0), l^p(w1))");
  }

  const ConcavePL kx = k_curve(x, couple, options).curve;
  auto bound = [&](double t) {
    double s = 0.0;
    for (const ConcavePL& phi : majorants) s += std::pow(phi(t), p);
    return std::pow(s, 1.0 / p);
  };
  check_hypothesis(kx, bound, probe_points(kx, majorants, options.grid),
                   "hypothesis K(t, x) <= (sum phi_i(t)^p)^{1/p}");

  const VecXd& xv = element_values(x);
  const Element u = element_with_values(x, xv.cwiseAbs().array().pow(p).matrix());
  std::vector<ConcavePL> psi;
  double quasi = 1.0;
  for (const ConcavePL& phi : majorants) {
    const ConcavePL tilde = convexified_majorant(phi, p);
    // The gap is largest strictly between knot images; sample each segment.
    const VecXd& kt = tilde.knots_t();
    for (Eigen::Index i = 0; i + 1 < kt.size(); ++i) {
      for (int m = 1; m < 16; ++m) {
        const double t = kt(i) + (kt(i + 1) - kt(i)) * m / 16.0;
        const double raw = std::pow(phi(std::pow(t, 1.0 / p)), p);
        if (raw > 0.0) quasi = std::max(quasi, tilde(t) / raw);
      }
    }
    psi.push_back(tilde.scaled(std::exp2(1.0 - p)));
  }

  DivisibilityCertificate cu = k_divide(u, convex, psi, options);
  DivisibilityCertificate cert;
  cert.p = p;
  cert.majorants = majorants;
  cert.quasi_concavity = quasi;
  cert.gamma_cert = p_divide_gamma(p);
  cert.transfer = cu.transfer;
  cert.transfer_norm = cu.transfer_norm;
  cert.band_upper = cu.band_upper;
  cert.sign_aligned = cu.sign_aligned;
  cert.constants = VecXd::Zero(static_cast<Eigen::Index>(majorants.size()));
  const VecXd sign = xv.array().sign().matrix();
  VecXd acc = VecXd::Zero(xv.size());
  for (std::size_t i = 0; i < cu.pieces.size(); ++i) {
    const VecXd ui = element_values(cu.pieces[i]).cwiseMax(0.0);
    const VecXd xi = ui.array().pow(1.0 / p).matrix().cwiseProduct(sign);
    const Element e = element_with_values(x, xi);
    acc = element_values(oplus(element_with_values(x, acc), e, 1.0 / p));
    const bool zero = element_is_zero(e);
    const ConcavePL kp = zero ? ConcavePL() : k_curve(e, couple, options).curve;
    cert.constants(static_cast<Eigen::Index>(i)) = piece_constant(kp, majorants[i], zero);
    cert.pieces.push_back(e);
  }
  cert.residual = (acc - xv).cwiseAbs().maxCoeff() / std::max(xv.cwiseAbs().maxCoeff(), 1e-300);
  cert.gamma_measured = cert.constants.size() != 0 ? cert.constants.maxCoeff() : 0.0;
  return cert;
}

}  // namespace kdiv
