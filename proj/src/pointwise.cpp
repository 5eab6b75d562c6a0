#include "pointwise.hpp"

#include <algorithm>
#include <numeric>

namespace kdiv::detail {

namespace {

double leg_weight(const Leg& leg, const Element& x, Eigen::Index k) {
  double w = leg.weights.size() != 0 ? leg.weights(k) : 1.0;
  if (leg.inverse_t_weight) {
    const double l = std::get<StepFunction>(x).left(k);
    w = l > 0.0 ? w / l : kInf;
  }
  return w;
}

struct Golden {
  double x;
  double f;
};

template <typename F>
Golden golden_min(F&& f, double lo, double hi, int iterations = 60) {
  constexpr double kRatio = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kRatio * (b - a);
  double d = a + kRatio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kRatio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kRatio * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? Golden{c, fc} : Golden{d, fd};
}

}  // namespace

PointwiseView::PointwiseView(const Element& x, const Leg& leg0, const Leg& leg1)
    : p0(leg0.exponent), p1(leg1.exponent), shape(x) {
  if (!(p0 > 0.0) || !(p1 > 0.0)) throw ValidationError("pointwise: exponents must be positive");
  const VecXd& v = element_values(x);
  const bool seq = std::holds_alternative<WeightedSeq>(x);
  for (const Leg* leg : {&leg0, &leg1}) {
    if (leg->weights.size() != 0 && leg->weights.size() != v.size()) {
      throw ValidationError("pointwise: dimension mismatch between element and weights");
    }
    if (leg->inverse_t_weight && seq) {
      throw ValidationError("pointwise: the 1/t weight needs a step function");
    }
  }
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v(k) != 0.0) index.push_back(k);
  }
  const auto n = static_cast<Eigen::Index>(index.size());
  mag.resize(n);
  measure.resize(n);
  w0.resize(n);
  w1.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = index[static_cast<std::size_t>(i)];
    mag(i) = std::abs(v(k));
    measure(i) = seq ? 1.0 : std::get<StepFunction>(x).length(k);
    w0(i) = leg_weight(leg0, x, k);
    w1(i) = leg_weight(leg1, x, k);
  }
  full0 = VecXd::Zero(n);
  full1 = VecXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p0)) full0(i) = measure(i) * std::pow(w0(i) * mag(i), p0);
    if (std::isfinite(p1)) full1(i) = measure(i) * std::pow(w1(i) * mag(i), p1);
  }
}

double PointwiseView::norm(const VecXd& v, const VecXd& w, double p, const VecXd& full) const {
  const bool sup = std::isinf(p);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) <= 0.0) continue;
    if (std::isinf(w(i))) return kInf;
    const double s = w(i) * v(i);
    if (sup) {
      acc = std::max(acc, s);
    } else {
      acc += v(i) == mag(i) ? full(i) : measure(i) * std::pow(s, p);
    }
  }
  return sup ? acc : std::pow(acc, 1.0 / p);
}

bool PointwiseView::exhaustive() const {
  const Eigen::Index n = size();
  if (n <= 1) return true;
  if (std::isinf(p1) && p0 <= 1.0) return true;
  if (std::isinf(p0) && p1 <= 1.0) return true;
  if (p0 == 1.0 && p1 == 1.0) return true;
  return p0 <= 1.0 && p1 <= 1.0 && n <= 16;
}

void PointwiseView::for_each_candidate(const std::function<void(const VecXd&)>& visit) const {
  const Eigen::Index n = size();
  visit(VecXd::Zero(n));
  visit(mag);
  VecXd a(n);
  auto levels = [&](const VecXd& w) {
    std::vector<double> cs;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::isfinite(w(k) * mag(k))) cs.push_back(w(k) * mag(k));
    }
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return cs;
  };
  // Leg-1 truncation: |x1| <= c / w1.
  for (double c : levels(w1)) {
    for (Eigen::Index j = 0; j < n; ++j) a(j) = std::max(0.0, mag(j) - c / w1(j));
    visit(a);
  }
  // Leg-0 truncation: |x0| <= c / w0.
  for (double c : levels(w0)) {
    for (Eigen::Index j = 0; j < n; ++j) a(j) = std::min(mag(j), c / w0(j));
    visit(a);
  }
  // Prefix subsets along magnitude and weight-ratio orders.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  VecXd ratio(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    ratio(k) = std::isinf(w1(k)) ? 0.0 : (std::isinf(w0(k)) ? kInf : w0(k) / w1(k));
  }
  // Orders that list the same coordinate data give the same costs.
  std::vector<std::vector<Eigen::Index>> seen;
  auto same_data = [&](const std::vector<Eigen::Index>& o) {
    for (std::size_t k = 0; k < o.size(); ++k) {
      const Eigen::Index i = o[k];
      const Eigen::Index j = order[k];
      if (mag(i) != mag(j) || w0(i) != w0(j) || w1(i) != w1(j) || measure(i) != measure(j)) return false;
    }
    return true;
  };
  auto prefixes = [&](auto&& less) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), less);
    if (std::any_of(seen.begin(), seen.end(), same_data)) return;
    seen.push_back(order);
    a.setZero();
    for (Eigen::Index len = 0; len + 1 < n; ++len) {
      const Eigen::Index k = order[static_cast<std::size_t>(len)];
      a(k) = mag(k);
      visit(a);
    }
  };
  prefixes([&](Eigen::Index i, Eigen::Index j) { return mag(i) > mag(j); });
  prefixes([&](Eigen::Index i, Eigen::Index j) { return mag(i) < mag(j); });
  prefixes([&](Eigen::Index i, Eigen::Index j) { return ratio(i) < ratio(j); });
  prefixes([&](Eigen::Index i, Eigen::Index j) { return ratio(i) > ratio(j); });
  // Both costs concave on the box: some vertex is optimal.
  if (p0 <= 1.0 && p1 <= 1.0 && n <= 16) {
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      for (Eigen::Index k = 0; k < n; ++k) a(k) = (mask >> k) & 1u ? mag(k) : 0.0;
      visit(a);
    }
  }
}

Element PointwiseView::lift(const VecXd& a) const {
  const VecXd& v = element_values(shape);
  VecXd out = VecXd::Zero(v.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Eigen::Index k = index[i];
    out(k) = std::copysign(a(static_cast<Eigen::Index>(i)), v(k));
  }
  return element_with_values(shape, std::move(out));
}

VecXd minimize_split(const PointwiseView& view, double t, double accuracy) {
  const Eigen::Index n = view.size();
  VecXd best = VecXd::Zero(n);
  double best_cost = kInf;
  view.for_each_candidate([&](const VecXd& a) {
    const double c = view.cost(a, t);
    if (c < best_cost) {
      best_cost = c;
      best = a;
    }
  });
  if (view.exhaustive()) return best;

  // Refine the truncation parameter between consecutive candidate values.
  auto refine = [&](const VecXd& w, bool leg1) {
    std::vector<double> cs{0.0};
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::isfinite(w(k))) cs.push_back(w(k) * view.mag(k));
    }
    std::sort(cs.begin(), cs.end());
    VecXd a(n);
    auto amplitude = [&](double c) {
      for (Eigen::Index j = 0; j < n; ++j) {
        a(j) = leg1 ? std::max(0.0, view.mag(j) - c / w(j)) : std::min(view.mag(j), c / w(j));
      }
      return view.cost(a, t);
    };
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      if (!(cs[i + 1] > cs[i])) continue;
      const Golden g = golden_min(amplitude, cs[i], cs[i + 1]);
      if (g.f < best_cost) {
        amplitude(g.x);
        best_cost = view.cost(a, t);
        best = a;
      }
    }
  };
  refine(view.w1, true);
  refine(view.w0, false);

  // Cyclic coordinate descent.
  VecXd a = best;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double start = best_cost;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double m = view.mag(k);
      auto g = [&](double s) {
        a(k) = s;
        return view.cost(a, t);
      };
      constexpr int kSamples = 16;
      int arg = 0;
      double fbest = kInf;
      for (int j = 0; j <= kSamples; ++j) {
        const double f = g(m * j / kSamples);
        if (f < fbest) {
          fbest = f;
          arg = j;
        }
      }
      double s = m * arg / kSamples;
      const Golden gm = golden_min(g, m * std::max(0, arg - 1) / kSamples,
                                   m * std::min(kSamples, arg + 1) / kSamples);
      if (gm.f < fbest) {
        fbest = gm.f;
        s = gm.x;
      }
      if (fbest < best_cost) {
        a(k) = s;
        best_cost = fbest;
        best = a;
      } else {
        a(k) = best(k);
      }
    }
    if (!(start - best_cost > accuracy * 1e-3 * best_cost)) break;
  }
  return best;
}

}  // namespace kdiv::detail
