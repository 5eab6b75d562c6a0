#include "kdiv/couple.hpp"

#include <algorithm>

namespace kdiv {

namespace {

void check_exponent(double p, const char* what) {
  if (!(p > 0.0)) throw ValidationError(std::string(what) + ": exponent must be positive");
}

void check_weights(const VecXd& w, bool allow_inf, const char* what) {
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (!(w(k) > 0.0) || (!allow_inf && std::isinf(w(k)))) {
      throw ValidationError(std::string(what) + ": weights must be positive" +
                            (allow_inf ? "" : " and finite"));
    }
  }
}

}  // namespace

CoupleDescriptor CoupleDescriptor::sequence_lp(double p, double q, VecXd w0, VecXd w1) {
  CoupleDescriptor c{CoupleKind::SequenceLp, p, q, std::move(w0), std::move(w1)};
  c.validate();
  return c;
}

CoupleDescriptor CoupleDescriptor::function_lp(double p, double q) {
  CoupleDescriptor c{CoupleKind::FunctionLp, p, q, {}, {}};
  c.validate();
  return c;
}

CoupleDescriptor CoupleDescriptor::weighted_l1(VecXd w0, VecXd w1) {
  CoupleDescriptor c{CoupleKind::WeightedL1, 1.0, 1.0, std::move(w0), std::move(w1)};
  c.validate();
  return c;
}

CoupleDescriptor CoupleDescriptor::linfty_couple() {
  CoupleDescriptor c{CoupleKind::LInftyCouple, kInf, kInf, {}, {}};
  return c;
}

void CoupleDescriptor::validate() const {
  switch (kind) {
    case CoupleKind::SequenceLp:
    case CoupleKind::FunctionLp:
      check_exponent(p, "couple");
      check_exponent(q, "couple");
      if (p > q) throw ValidationError("couple: exponents must satisfy p <= q");
      if (kind == CoupleKind::FunctionLp && (w0.size() != 0 || w1.size() != 0)) {
        throw ValidationError("function_lp: weights are not supported");
      }
      check_weights(w0, false, "sequence_lp");
      check_weights(w1, false, "sequence_lp");
      if (w0.size() != 0 && w1.size() != 0 && w0.size() != w1.size()) {
        throw ValidationError("couple: weight dimensions differ");
      }
      break;
    case CoupleKind::WeightedL1:
      if (w0.size() != w1.size() || w0.size() == 0) {
        throw ValidationError("weighted_l1: w0 and w1 must be nonempty and of equal length");
      }
      check_weights(w0, true, "weighted_l1");
      check_weights(w1, true, "weighted_l1");
      break;
    case CoupleKind::LInftyCouple:
      break;
  }
}

void CoupleDescriptor::validate_element(const Element& x) const {
  const bool seq = std::holds_alternative<WeightedSeq>(x);
  if (seq != is_sequence()) {
    throw ValidationError("element kind does not match couple " + tag());
  }
  if (seq) {
    const auto& v = std::get<WeightedSeq>(x);
    if (v.size() == 0) throw ValidationError("element: empty sequence");
    if (!v.allFinite()) throw ValidationError("element: entries must be finite");
    for (const VecXd* w : {&w0, &w1}) {
      if (w->size() != 0 && w->size() != v.size()) {
        throw ValidationError("element: dimension does not match couple weights");
      }
    }
  }
}

Leg CoupleDescriptor::leg0() const {
  switch (kind) {
    case CoupleKind::WeightedL1: return {1.0, w0, false};
    case CoupleKind::LInftyCouple: return {kInf, {}, false};
    default: return {p, w0, false};
  }
}

Leg CoupleDescriptor::leg1() const {
  switch (kind) {
    case CoupleKind::WeightedL1: return {1.0, w1, false};
    case CoupleKind::LInftyCouple: return {kInf, {}, true};
    default: return {q, w1, false};
  }
}

std::string CoupleDescriptor::tag() const {
  switch (kind) {
    case CoupleKind::SequenceLp: return "sequence_lp";
    case CoupleKind::FunctionLp: return "function_lp";
    case CoupleKind::WeightedL1: return "weighted_l1";
    case CoupleKind::LInftyCouple: return "linfty_couple";
  }
  return "unknown";
}

double quasi_norm(const WeightedSeq& x, const Leg& leg) {
  check_exponent(leg.exponent, "quasi_norm");
  if (leg.weights.size() != 0 && leg.weights.size() != x.size()) {
    throw ValidationError("quasi_norm: dimension mismatch between element and weights");
  }
  const bool inf_exp = std::isinf(leg.exponent);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = std::abs(x(k));
    if (a == 0.0) continue;
    const double w = leg.weights.size() != 0 ? leg.weights(k) : 1.0;
    if (std::isinf(w)) return kInf;
    const double v = w * a;
    acc = inf_exp ? std::max(acc, v) : acc + std::pow(v, leg.exponent);
  }
  return inf_exp ? acc : std::pow(acc, 1.0 / leg.exponent);
}

double quasi_norm(const StepFunction& f, const Leg& leg) {
  check_exponent(leg.exponent, "quasi_norm");
  if (leg.weights.size() != 0) throw ValidationError("quasi_norm: weighted function legs unsupported");
  const bool inf_exp = std::isinf(leg.exponent);
  if (leg.inverse_t_weight && !inf_exp) {
    throw ValidationError("quasi_norm: the 1/t weight is only supported for p = inf");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.pieces(); ++i) {
    const double a = std::abs(f.values()(i));
    if (a == 0.0) continue;
    if (inf_exp) {
      // sup over (l, r] of a / s is a / l.
      const double v = leg.inverse_t_weight ? (f.left(i) > 0.0 ? a / f.left(i) : kInf) : a;
      acc = std::max(acc, v);
    } else {
      acc += f.length(i) * std::pow(a, leg.exponent);
    }
  }
  return inf_exp ? acc : std::pow(acc, 1.0 / leg.exponent);
}

double quasi_norm(const Element& x, const Leg& leg) {
  return std::visit([&](const auto& v) { return quasi_norm(v, leg); }, x);
}

double quasi_triangle_constant(double p) {
  check_exponent(p, "quasi_triangle_constant");
  return std::max(1.0, std::exp2((1.0 - p) / p));
}

Element element_abs(const Element& x) {
  return element_with_values(x, element_values(x).cwiseAbs());
}

bool element_is_zero(const Element& x) { return element_values(x).isZero(0.0); }

Eigen::Index element_size(const Element& x) { return element_values(x).size(); }

const VecXd& element_values(const Element& x) {
  if (const auto* v = std::get_if<WeightedSeq>(&x)) return *v;
  return std::get<StepFunction>(x).values();
}

Element element_with_values(const Element& x, VecXd values) {
  if (std::holds_alternative<WeightedSeq>(x)) return Element{std::move(values)};
  return Element{std::get<StepFunction>(x).with_values(std::move(values))};
}

}  // namespace kdiv
