#include "kdiv/divisibility.hpp"

#include "atoms.hpp"
#include "kdiv/kmethod.hpp"

#include <algorithm>
#include <map>

namespace kdiv {

namespace detail {

Atomization atomize(const Element& x, const CoupleDescriptor& couple) {
  couple.validate();
  couple.validate_element(x);
  const VecXd& v = element_values(x);
  const Eigen::Index n = v.size();
  Atomization out;
  out.sign = VecXd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) out.sign(k) = v(k) > 0.0 ? 1.0 : (v(k) < 0.0 ? -1.0 : 0.0);

  const bool weighted = couple.kind == CoupleKind::WeightedL1 ||
                        (couple.kind == CoupleKind::SequenceLp && couple.p == 1.0 && couple.q == 1.0);
  const bool layered = (couple.kind == CoupleKind::SequenceLp && couple.p == 1.0 &&
                        std::isinf(couple.q) && couple.w0.size() == 0 && couple.w1.size() == 0) ||
                       (couple.kind == CoupleKind::FunctionLp && couple.p == 1.0 && std::isinf(couple.q));
  std::vector<double> V;
  std::vector<double> S;
  if (weighted) {
    const VecXd w0 = couple.w0.size() != 0 ? couple.w0 : VecXd::Ones(n);
    const VecXd w1 = couple.w1.size() != 0 ? couple.w1 : VecXd::Ones(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (v(k) == 0.0) continue;
      if (std::isinf(w0(k)) && std::isinf(w1(k))) {
        throw ValidationError("atoms: coordinate outside the sum space");
      }
      const double a = std::abs(v(k));
      VecXd part = VecXd::Zero(n);
      part(k) = a;
      out.parts.push_back(std::move(part));
      V.push_back(a * w0(k));
      S.push_back(a * w1(k));
    }
  } else if (layered) {
    const VecXd a = v.cwiseAbs();
    VecXd mu = VecXd::Ones(n);
    if (const auto* f = std::get_if<StepFunction>(&x)) mu = f->lengths();
    std::vector<double> levels;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (a(k) > 0.0) levels.push_back(a(k));
    }
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double top = levels[l];
      const double below = l + 1 < levels.size() ? levels[l + 1] : 0.0;
      VecXd part(n);
      double measure = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        part(k) = std::max(0.0, std::min(a(k), top) - below);
        if (a(k) >= top) measure += mu(k);
      }
      out.parts.push_back(std::move(part));
      V.push_back((top - below) * measure);
      S.push_back(top - below);
    }
  } else {
    throw ValidationError("divisibility: unsupported couple " + couple.tag());
  }
  out.V = Eigen::Map<VecXd>(V.data(), static_cast<Eigen::Index>(V.size()));
  out.S = Eigen::Map<VecXd>(S.data(), static_cast<Eigen::Index>(S.size()));
  return out;
}

}  // namespace detail

std::vector<VecXd> riesz_decompose(const VecXd& y, const std::vector<VecXd>& parts) {
  if (parts.empty()) throw ValidationError("riesz: no parts");
  VecXd total = VecXd::Zero(y.size());
  for (const VecXd& p : parts) {
    if (p.size() != y.size()) throw ValidationError("riesz: dimension mismatch");
    if ((p.array() < 0.0).any() || !p.allFinite()) throw ValidationError("riesz: parts must be nonnegative");
    total += p;
  }
  if ((y.array() < 0.0).any() || !y.allFinite()) throw ValidationError("riesz: y must be nonnegative");
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (y(k) > total(k) * (1.0 + 1e-12)) {
      throw ValidationError("riesz: y exceeds the sum of the parts at index " + std::to_string(k));
    }
  }
  std::vector<VecXd> z;
  VecXd residual = y;
  for (const VecXd& p : parts) {
    VecXd zn = residual.cwiseMin(p);
    residual -= zn;
    z.push_back(std::move(zn));
  }
  // Rounding leftovers go to the last part with room.
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (residual(k) <= 0.0) continue;
    for (std::size_t i = z.size(); i-- > 0;) {
      if (parts[i](k) > 0.0) {
        z[i](k) += residual(k);
        break;
      }
    }
  }
  return z;
}

FundamentalSplit fundamental_split(const Element& x, const CoupleDescriptor& couple, double epsilon,
                                   const KOptions& options) {
  if (!(epsilon >= 0.0)) throw ValidationError("fundamental split: epsilon must be nonnegative");
  const detail::Atomization atoms = detail::atomize(x, couple);
  const VecXd& v = element_values(x);
  FundamentalSplit out;
  out.epsilon = epsilon;
  out.minus_inf = element_with_values(x, VecXd::Zero(v.size()));
  out.plus_inf = out.minus_inf;

  std::map<int, VecXd> blocks;
  VecXd minus = VecXd::Zero(v.size());
  VecXd plus = VecXd::Zero(v.size());
  for (std::size_t j = 0; j < atoms.parts.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double rho = detail::atom_ratio(atoms.V(jj), atoms.S(jj));
    const VecXd signed_part = atoms.parts[j].cwiseProduct(atoms.sign);
    if (rho == 0.0) {
      minus += signed_part;
    } else if (std::isinf(rho)) {
      plus += signed_part;
    } else {
      const int n = static_cast<int>(std::floor(std::log2(rho)));
      auto [it, fresh] = blocks.try_emplace(n, VecXd::Zero(v.size()));
      it->second += signed_part;
    }
  }
  if (!blocks.empty()) {
    out.n_min = blocks.begin()->first;
    out.n_max = blocks.rbegin()->first;
  }
  for (int n = out.n_min; n <= out.n_max; ++n) {
    auto it = blocks.find(n);
    out.blocks.push_back(element_with_values(x, it != blocks.end() ? it->second : VecXd::Zero(v.size())));
  }
  out.minus_inf = element_with_values(x, minus);
  out.plus_inf = element_with_values(x, plus);

  const auto m = static_cast<Eigen::Index>(out.blocks.size());
  out.norm0.resize(m + 2);
  out.norm1.resize(m + 2);
  const Leg l0 = couple.leg0();
  const Leg l1 = couple.leg1();
  auto record = [&](Eigen::Index i, const Element& e) {
    const bool zero = element_is_zero(e);
    out.norm0(i) = zero ? 0.0 : quasi_norm(e, l0);
    out.norm1(i) = zero ? 0.0 : quasi_norm(e, l1);
  };
  for (Eigen::Index i = 0; i < m; ++i) record(i, out.blocks[static_cast<std::size_t>(i)]);
  record(m, out.minus_inf);
  record(m + 1, out.plus_inf);

  if (atoms.parts.empty()) return out;
  const ConcavePL lhs = ConcavePL::sum_of_mins(out.norm0, out.norm1);
  const ConcavePL kx = k_curve(x, couple, options).curve;
  out.audit_gamma = orbit_norm(lhs, kx);
  for (int i = 0; i < options.grid.size(); ++i) {
    const double t = options.grid.node(i);
    out.audit_gamma = std::max(out.audit_gamma, lhs(t) / kx(t));
  }
  out.audit_passed = out.audit_gamma <= 2.0 * (1.0 + epsilon);
  return out;
}

}  // namespace kdiv
