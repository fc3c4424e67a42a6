#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

// Result of the separation problem
//
//   maximize  <target, phi> - max_i <point_i, phi>   over phi in [0,1]^m.
//
// For probability vectors the optimum is zero iff target lies in the convex
// hull of the points; otherwise `direction` is a separating test function
// and `gap` the amount by which it separates.
template <Scalar T>
struct Separation {
  T gap{0};
  std::vector<T> direction;
};

namespace detail {

// Dense-tableau primal simplex for  max c.z  s.t.  A z <= b, z >= 0, b >= 0.
// The slack basis is feasible, so no phase one is needed. Bland's rule.
template <Scalar T>
class BoundedSimplex {
 public:
  BoundedSimplex(std::size_t num_vars, std::size_t num_rows)
      : nv_(num_vars),
        nr_(num_rows),
        cols_(num_vars + num_rows),
        tab_(num_rows * (num_vars + num_rows), T(0)),
        rhs_(num_rows, T(0)),
        cost_(num_vars + num_rows, T(0)),
        basis_(num_rows) {
    for (std::size_t r = 0; r < nr_; ++r) {
      at(r, nv_ + r) = T(1);
      basis_[r] = nv_ + r;
    }
  }

  T& at(std::size_t r, std::size_t c) { return tab_[r * cols_ + c]; }
  T& rhs(std::size_t r) { return rhs_[r]; }
  // Objective coefficient of structural variable c (maximization).
  void set_objective(std::size_t c, const T& value) { cost_[c] = -value; }

  T solve() {
    const T eps = pivot_eps();
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (cost_[c] < -eps) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) break;

      std::size_t leave = nr_;
      T best_ratio{0};
      for (std::size_t r = 0; r < nr_; ++r) {
        const T& a = at(r, enter);
        if (!(a > eps)) continue;
        T ratio = rhs_[r] / a;
        if (leave == nr_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == nr_) {
        throw Error(ErrorKind::numerical_failure, "separation LP is unbounded");
      }
      pivot(leave, enter);
    }
    return objective_;
  }

  [[nodiscard]] T value_of(std::size_t var) const {
    for (std::size_t r = 0; r < nr_; ++r) {
      if (basis_[r] == var) return rhs_[r];
    }
    return T(0);
  }

 private:
  static T pivot_eps() {
    if constexpr (NumericTraits<T>::exact) {
      return T(0);
    } else {
      return NumericTraits<T>::pivot_eps;
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    const T inv = T(1) / at(pr, pc);
    for (std::size_t c = 0; c < cols_; ++c) at(pr, c) *= inv;
    rhs_[pr] *= inv;
    at(pr, pc) = T(1);
    for (std::size_t r = 0; r < nr_; ++r) {
      if (r == pr) continue;
      const T factor = at(r, pc);
      if (factor == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (at(pr, c) != 0) at(r, c) -= factor * at(pr, c);
      }
      rhs_[r] -= factor * rhs_[pr];
      at(r, pc) = T(0);
    }
    const T factor = cost_[pc];
    if (factor != 0) {
      for (std::size_t c = 0; c < cols_; ++c) {
        if (at(pr, c) != 0) cost_[c] -= factor * at(pr, c);
      }
      objective_ -= factor * rhs_[pr];
      cost_[pc] = T(0);
    }
    basis_[pr] = pc;
  }

  std::size_t nv_;
  std::size_t nr_;
  std::size_t cols_;
  std::vector<T> tab_;
  std::vector<T> rhs_;
  std::vector<T> cost_;
  T objective_{0};
  std::vector<std::size_t> basis_;
};

}  // namespace detail

template <Scalar T>
[[nodiscard]] Separation<T> separate(std::span<const T> target,
                                     const std::vector<std::vector<T>>& points) {
  if (points.empty()) {
    throw Error(ErrorKind::invalid_model, "separation against an empty point set");
  }
  const std::size_t dim = target.size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw Error(ErrorKind::invalid_model, "separation: dimension mismatch");
    }
  }

  // Coordinates where every vector vanishes do not constrain anything.
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < dim; ++j) {
    bool used = target[j] != 0;
    for (std::size_t i = 0; i < points.size() && !used; ++i) used = points[i][j] != 0;
    if (used) active.push_back(j);
  }

  Separation<T> result;
  result.direction.assign(dim, T(0));
  const std::size_t m = active.size();
  if (m == 0) return result;

  // Variables: phi_0..phi_{m-1}, t.  Rows: phi_j <= 1, <p_i,phi> - t <= 0.
  const std::size_t t_var = m;
  detail::BoundedSimplex<T> lp(m + 1, m + points.size());
  for (std::size_t j = 0; j < m; ++j) {
    lp.at(j, j) = T(1);
    lp.rhs(j) = T(1);
    lp.set_objective(j, target[active[j]]);
  }
  lp.set_objective(t_var, T(-1));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t r = m + i;
    for (std::size_t j = 0; j < m; ++j) lp.at(r, j) = points[i][active[j]];
    lp.at(r, t_var) = T(-1);
  }

  T gap = lp.solve();
  if constexpr (!NumericTraits<T>::exact) {
    if (gap < 0) gap = 0;
  }
  result.gap = gap;
  for (std::size_t j = 0; j < m; ++j) result.direction[active[j]] = lp.value_of(j);
  return result;
}

template <Scalar T>
[[nodiscard]] bool in_convex_hull(std::span<const T> target,
                                  const std::vector<std::vector<T>>& points) {
  return !(separate(target, points).gap > zero_tolerance<T>());
}

// Indices of the extreme points among `points`; exact duplicates keep their
// first occurrence.
template <Scalar T>
[[nodiscard]] std::vector<std::size_t> hull_vertex_indices(
    const std::vector<std::vector<T>>& points) {
  std::vector<std::size_t> unique;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dup = false;
    for (std::size_t u : unique) {
      if (points[u] == points[i]) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(i);
  }
  if (unique.size() <= 2) return unique;

  std::vector<std::size_t> vertices;
  for (std::size_t a = 0; a < unique.size(); ++a) {
    std::vector<std::vector<T>> others;
    others.reserve(unique.size() - 1);
    for (std::size_t b = 0; b < unique.size(); ++b) {
      if (b != a) others.push_back(points[unique[b]]);
    }
    if (!in_convex_hull<T>(points[unique[a]], others)) vertices.push_back(unique[a]);
  }
  return vertices;
}

}  // namespace sublin
