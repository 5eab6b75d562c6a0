#pragma once

// Dense two-phase simplex with Bland's rule. The scalar may be double or an
// exact field type such as mpq_class.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace kdiv {

enum class Relation { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

/// Pivot tolerance. Exact types compare against zero.
template <typename Scalar>
struct SimplexTolerance {
  static Scalar pivot() { return Scalar(0); }
  static Scalar feasibility() { return Scalar(0); }
};

template <>
struct SimplexTolerance<double> {
  static double pivot() { return 1e-11; }
  static double feasibility() { return 1e-9; }
};

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<Scalar> x;
  Scalar objective = Scalar(0);
  int iterations = 0;
};

/// minimize c^T x subject to rows a_i^T x (<=, =, >=) b_i and x >= 0.
template <typename Scalar>
class DenseSimplex {
 public:
  explicit DenseSimplex(std::size_t num_vars) : n_(num_vars), c_(num_vars, Scalar(0)) {}

  void add_constraint(std::vector<Scalar> coeffs, Relation rel, Scalar rhs) {
    if (coeffs.size() != n_) throw std::invalid_argument("simplex: constraint width mismatch");
    rows_.push_back({std::move(coeffs), rel, std::move(rhs)});
  }

  void set_objective(std::vector<Scalar> c) {
    if (c.size() != n_) throw std::invalid_argument("simplex: objective width mismatch");
    c_ = std::move(c);
  }

  [[nodiscard]] std::size_t num_vars() const { return n_; }
  [[nodiscard]] std::size_t num_constraints() const { return rows_.size(); }

  [[nodiscard]] LpResult<Scalar> solve(int max_iterations = 200000) const;

 private:
  struct Row {
    std::vector<Scalar> a;
    Relation rel;
    Scalar b;
  };
  std::size_t n_;
  std::vector<Scalar> c_;
  std::vector<Row> rows_;
};

namespace detail {

template <typename Scalar>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), cols_(cols), data_((rows + 1) * (cols + 1), Scalar(0)), basis_(rows, 0) {}

  Scalar& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  const Scalar& at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  Scalar& rhs(std::size_t r) { return at(r, cols_); }
  // Row m_ holds reduced costs; its rhs is minus the objective.
  Scalar& cost(std::size_t c) { return at(m_, c); }

  void pivot(std::size_t r, std::size_t c) {
    const Scalar inv = Scalar(1) / at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const Scalar f = at(i, c);
      if (f == Scalar(0)) continue;
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (at(r, j) != Scalar(0)) at(i, j) -= f * at(r, j);
      }
    }
    basis_[r] = c;
  }

  /// Bland's rule iterations on the current cost row. Columns with
  /// blocked[c] never enter.
  LpStatus run(const std::vector<bool>& blocked, int& iterations, int max_iterations) {
    const Scalar eps = SimplexTolerance<Scalar>::pivot();
    while (true) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!blocked[j] && cost(j) < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return LpStatus::Optimal;
      if (iterations >= max_iterations) return LpStatus::IterationLimit;
      std::size_t leave = m_;
      Scalar best_ratio(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!(at(i, enter) > eps)) continue;
        const Scalar ratio = rhs(i) / at(i, enter);
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return LpStatus::Unbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }

  std::size_t m_;
  std::size_t cols_;
  std::vector<Scalar> data_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

template <typename Scalar>
LpResult<Scalar> DenseSimplex<Scalar>::solve(int max_iterations) const {
  const std::size_t m = rows_.size();
  // Column layout: structural | slack/surplus | artificial.
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const Row& r : rows_) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq || r.b < Scalar(0)) ++n_art;
  }
  const std::size_t cols = n_ + n_slack + n_art;
  detail::Tableau<Scalar> tab(m, cols);
  std::vector<bool> artificial(cols, false);
  std::size_t slack = n_;
  std::size_t art = n_ + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& r = rows_[i];
    const bool flip = r.b < Scalar(0);
    const Scalar sign = flip ? Scalar(-1) : Scalar(1);
    for (std::size_t j = 0; j < n_; ++j) tab.at(i, j) = sign * r.a[j];
    tab.rhs(i) = sign * r.b;
    Relation rel = r.rel;
    if (flip && rel != Relation::Equal) {
      rel = rel == Relation::LessEq ? Relation::GreaterEq : Relation::LessEq;
    }
    if (r.rel != Relation::Equal) {
      tab.at(i, slack) = rel == Relation::LessEq ? Scalar(1) : Scalar(-1);
      if (rel == Relation::LessEq) tab.basis_[i] = slack;
      ++slack;
    }
    if (rel != Relation::LessEq) {
      tab.at(i, art) = Scalar(1);
      artificial[art] = true;
      tab.basis_[i] = art;
      ++art;
    }
  }
  // An unused artificial column (a flipped <= row became >=, counted
  // already) stays zero and harmless.

  LpResult<Scalar> out;
  std::vector<bool> none(cols, false);
  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j <= cols; ++j) tab.cost(j) = Scalar(0);
  for (std::size_t i = 0; i < m; ++i) {
    if (!artificial[tab.basis_[i]]) continue;
    for (std::size_t j = 0; j <= cols; ++j) {
      if (!artificial[j]) tab.cost(j) -= tab.at(i, j);
    }
  }
  LpStatus st = tab.run(none, out.iterations, max_iterations);
  if (st == LpStatus::IterationLimit) {
    out.status = st;
    return out;
  }
  Scalar scale(1);
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.rhs(i) > scale) scale = tab.rhs(i);
  }
  if (-tab.cost(cols) > SimplexTolerance<Scalar>::feasibility() * scale) {
    out.status = LpStatus::Infeasible;
    return out;
  }
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (!artificial[tab.basis_[i]]) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      if (!artificial[j] && tab.at(i, j) != Scalar(0) &&
          (tab.at(i, j) > SimplexTolerance<Scalar>::pivot() ||
           tab.at(i, j) < -SimplexTolerance<Scalar>::pivot())) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  // Phase 2.
  for (std::size_t j = 0; j <= cols; ++j) tab.cost(j) = j < n_ ? c_[j] : Scalar(0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis_[i];
    const Scalar cb = tab.cost(b);
    if (cb == Scalar(0)) continue;
    for (std::size_t j = 0; j <= cols; ++j) tab.cost(j) -= cb * tab.at(i, j);
  }
  st = tab.run(artificial, out.iterations, max_iterations);
  out.status = st;
  if (st != LpStatus::Optimal) return out;
  out.x.assign(n_, Scalar(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis_[i] < n_) out.x[tab.basis_[i]] = tab.rhs(i);
  }
  out.objective = Scalar(0);
  for (std::size_t j = 0; j < n_; ++j) out.objective += c_[j] * out.x[j];
  return out;
}

}  // namespace kdiv
