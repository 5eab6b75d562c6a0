#include "kdiv/kfunctional.hpp"

#include "kdiv/lattice.hpp"
#include "pointwise.hpp"

#include <algorithm>
#include <vector>

namespace kdiv {

std::string to_string(KMethod m) {
  switch (m) {
    case KMethod::ExactWeightedL1:
      return "exact_weighted_l1";
    case KMethod::ExactL1Linf:
      return "exact_l1_linf";
    case KMethod::ExactHull:
      return "exact_hull";
    case KMethod::Numeric:
      return "numeric";
  }
  return "unknown";
}

namespace {

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("K: t must be finite and positive");
}

void check_weighted(const VecXd& x, const VecXd& w0, const VecXd& w1) {
  if (x.size() != w0.size() || x.size() != w1.size()) {
    throw ValidationError("weighted l1: dimension mismatch");
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x(k))) throw ValidationError("weighted l1: entries must be finite");
    if (!(w0(k) > 0.0) || !(w1(k) > 0.0)) {
      throw ValidationError("weighted l1: weights must lie in (0, inf]");
    }
    if (x(k) != 0.0 && std::isinf(w0(k)) && std::isinf(w1(k))) {
      throw ValidationError("weighted l1: coordinate outside the sum space");
    }
  }
}

}  // namespace

double k_weighted_l1(const VecXd& x, const VecXd& w0, const VecXd& w1, double t) {
  check_t(t);
  check_weighted(x, w0, w1);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) != 0.0) sum += std::abs(x(k)) * std::min(w0(k), t * w1(k));
  }
  return sum;
}

KCurve k_exact_weighted_l1(const VecXd& x, const VecXd& w0, const VecXd& w1) {
  check_weighted(x, w0, w1);
  VecXd a = VecXd::Zero(x.size());
  VecXd b = VecXd::Zero(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (x(k) == 0.0) continue;
    a(k) = std::abs(x(k)) * w0(k);
    b(k) = std::abs(x(k)) * w1(k);
  }
  return {ConcavePL::sum_of_mins(a, b), CoupleDescriptor::weighted_l1(w0, w1), x,
          KMethod::ExactWeightedL1, 0.0};
}

KCurve k_exact_l1_linf(const StepFunction& f) {
  const StepFunction r = decreasing_rearrangement(f);
  VecXd t(r.pieces() + 1);
  VecXd y(r.pieces() + 1);
  t(0) = 0.0;
  y(0) = 0.0;
  for (Eigen::Index i = 0; i < r.pieces(); ++i) {
    t(i + 1) = r.right(i);
    y(i + 1) = y(i) + r.values()(i) * r.length(i);
  }
  return {ConcavePL(t, y, 0.0).simplified(), CoupleDescriptor::function_lp(1.0, kInf), f,
          KMethod::ExactL1Linf, 0.0};
}

KCurve k_exact_l1_linf(const WeightedSeq& x) {
  KCurve k = k_exact_l1_linf(StepFunction::from_sequence(x));
  k.couple = CoupleDescriptor::sequence_lp(1.0, kInf);
  k.element = x;
  return k;
}

KCurve k_exact_linfty_couple(const StepFunction& h) {
  return {least_concave_majorant(h), CoupleDescriptor::linfty_couple(), h, KMethod::ExactHull,
          0.0};
}

KValue k_pointwise(const Element& x, const Leg& leg0, const Leg& leg1, double t,
                   double accuracy) {
  check_t(t);
  if (!(accuracy > 0.0)) throw ValidationError("K: accuracy must be positive");
  const detail::PointwiseView view(x, leg0, leg1);
  const VecXd a = detail::minimize_split(view, t, accuracy);
  KValue out;
  out.witness.x0 = view.lift(a);
  out.witness.x1 = element_with_values(x, element_values(x) - element_values(out.witness.x0));
  out.witness.norm0 = quasi_norm(out.witness.x0, leg0);
  out.witness.norm1 = quasi_norm(out.witness.x1, leg1);
  out.witness.t = t;
  out.witness.objective = out.witness.norm0 + t * out.witness.norm1;
  out.value = out.witness.objective;
  return out;
}

KValue k_numeric(const Element& x, const CoupleDescriptor& couple, double t, double accuracy) {
  couple.validate();
  if (couple.kind != CoupleKind::SequenceLp && couple.kind != CoupleKind::FunctionLp) {
    throw ValidationError("numeric K: only (l^p, l^q) and (L^p, L^q) couples");
  }
  couple.validate_element(x);
  return k_pointwise(x, couple.leg0(), couple.leg1(), t, accuracy);
}

KCurve k_pointwise_curve(const Element& x, const Leg& leg0, const Leg& leg1, const Grid& grid,
                         double accuracy) {
  grid.validate();
  if (!(accuracy > 0.0)) throw ValidationError("K: accuracy must be positive");
  const detail::PointwiseView view(x, leg0, leg1);
  std::vector<Line> lines;
  auto add = [&](const VecXd& a) {
    const Line l = view.line(a);
    if (std::isfinite(l.value) && std::isfinite(l.slope)) lines.push_back(l);
  };
  view.for_each_candidate(add);
  const bool exact = view.exhaustive();
  if (!exact) {
    for (int i = 0; i < grid.size(); ++i) add(detail::minimize_split(view, grid.node(i), accuracy));
  }
  if (lines.empty()) throw NumericError("K: element has no finite split");
  KCurve k;
  k.curve = ConcavePL::lower_envelope(lines);
  k.element = x;
  k.method = KMethod::Numeric;
  k.accuracy = exact ? 0.0 : accuracy;
  return k;
}

KCurve k_curve(const Element& x, const CoupleDescriptor& couple, const KOptions& options) {
  couple.validate();
  couple.validate_element(x);
  const bool seq = std::holds_alternative<WeightedSeq>(x);
  switch (couple.kind) {
    case CoupleKind::WeightedL1:
      return k_exact_weighted_l1(std::get<WeightedSeq>(x), couple.w0, couple.w1);
    case CoupleKind::LInftyCouple:
      return k_exact_linfty_couple(std::get<StepFunction>(x));
    case CoupleKind::SequenceLp:
    case CoupleKind::FunctionLp:
      break;
  }
  if (couple.p == 1.0 && std::isinf(couple.q)) {
    if (!seq) return k_exact_l1_linf(std::get<StepFunction>(x));
    if (couple.w0.size() == 0 && couple.w1.size() == 0) {
      return k_exact_l1_linf(std::get<WeightedSeq>(x));
    }
  }
  if (seq && couple.p == 1.0 && couple.q == 1.0) {
    const VecXd& v = std::get<WeightedSeq>(x);
    const VecXd ones = VecXd::Ones(v.size());
    KCurve k = k_exact_weighted_l1(v, couple.w0.size() != 0 ? couple.w0 : ones,
                                   couple.w1.size() != 0 ? couple.w1 : ones);
    k.couple = couple;
    return k;
  }
  KCurve k = k_pointwise_curve(x, couple.leg0(), couple.leg1(), options.grid, options.accuracy);
  k.couple = couple;
  return k;
}

VecXd DyadicElement::entries() const {
  VecXd e(atoms());
  e(0) = alpha;
  e.segment(1, b.size()) = b;
  e(atoms() - 1) = beta;
  return e;
}

VecXd DyadicElement::weights0() const {
  VecXd w = VecXd::Ones(atoms());
  w(atoms() - 1) = kInf;
  return w;
}

VecXd DyadicElement::weights1() const {
  VecXd w(atoms());
  w(0) = kInf;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    w(i + 1) = std::exp2(-static_cast<double>(n_min + static_cast<int>(i)));
  }
  w(atoms() - 1) = 1.0;
  return w;
}

ConcavePL DyadicElement::k_curve() const {
  return k_exact_weighted_l1(entries(), weights0(), weights1()).curve;
}

ConvElement conv_to_element(const ConcavePL& phi, std::optional<std::pair<int, int>> range) {
  if (!phi.is_conv()) throw ValidationError("conv_to_element: function is not in Conv");
  const VecXd& t = phi.knots_t();
  const Eigen::Index m = t.size();
  int lo = 0;
  int hi = -1;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (hi < lo) throw ValidationError("conv_to_element: empty dyadic range");
  } else if (m > 1) {
    lo = static_cast<int>(std::floor(std::log2(t(1))));
    hi = static_cast<int>(std::floor(std::log2(t(m - 1))));
  }

  ConvElement out;
  DyadicElement& e = out.element;
  e.n_min = lo;
  e.n_max = hi;
  e.alpha = phi.value_at_zero();
  e.beta = phi.terminal_slope();
  e.b = VecXd::Zero(std::max(0, hi - lo + 1));
  for (Eigen::Index i = 1; i < m; ++i) {
    const double drop = std::max(0.0, phi.segment_slope(i - 1) - phi.segment_slope(i));
    if (drop == 0.0) continue;
    if (e.b.size() == 0) throw ValidationError("conv_to_element: dyadic range is empty");
    int n = static_cast<int>(std::floor(std::log2(t(i))));
    n = std::clamp(n, lo, hi);
    e.b(n - lo) += drop * t(i);
  }

  const ConcavePL kb = e.k_curve();
  std::vector<double> probes;
  const double left = std::exp2(static_cast<double>(lo));
  const double right = std::exp2(static_cast<double>(hi + 1));
  for (double s : merged_knots(phi, kb)) {
    if (s >= left && s <= right) probes.push_back(s);
  }
  probes.push_back(left);
  probes.push_back(right);
  out.band_lower = kInf;
  out.band_upper = 0.0;
  for (double s : probes) {
    const double f = phi(s);
    if (!(f > 0.0)) continue;
    const double r = kb(s) / f;
    out.band_lower = std::min(out.band_lower, r);
    out.band_upper = std::max(out.band_upper, r);
  }
  if (out.band_upper == 0.0) {
    out.band_lower = 1.0;
    out.band_upper = 1.0;
  }
  return out;
}

}  // namespace kdiv
