#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "sublin/measures.hpp"
#include "sublin/numeric.hpp"

namespace oracle {

using sublin::AmbiguitySet;
using sublin::DiscreteDistribution;
using sublin::Rational;

// Classical E[f(X_1 + ... + X_n)] for i.i.d. X_i ~ dist, summing over every
// one of |atoms|^n paths with their product weights.
template <class T>
T path_expectation(const DiscreteDistribution<T>& dist, std::size_t n,
                   const std::function<T(const T&)>& f) {
  const auto& atoms = dist.atoms();
  std::vector<std::size_t> pick(n, 0);
  T total(0);
  for (;;) {
    T sum(0);
    T weight(1);
    for (std::size_t i = 0; i < n; ++i) {
      sum += atoms[pick[i]].point;
      weight *= atoms[pick[i]].weight;
    }
    total += weight * f(sum);
    std::size_t i = 0;
    while (i < n && ++pick[i] == atoms.size()) pick[i++] = 0;
    if (i == n) break;
  }
  return total;
}

// The nested sublinear expectation evaluated on the full path tree, without
// merging equal partial sums: value(s, k) = max_Q sum_y Q(y) value(s + y, k + 1).
template <class T>
T tree_value(const std::vector<AmbiguitySet<T>>& steps, const std::function<T(const T&)>& f,
             const T& partial = T(0), std::size_t k = 0) {
  if (k == steps.size()) return f(partial);
  bool first = true;
  T best(0);
  for (const auto& q : steps[k].members()) {
    T v(0);
    for (const auto& a : q.atoms()) v += a.weight * tree_value<T>(steps, f, T(partial + a.point), k + 1);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

// Random probability vector with rational entries k_i / sum k.
inline std::vector<Rational> random_weights(std::mt19937_64& rng, std::size_t size, int max_count = 9,
                                            bool allow_zero = true) {
  std::uniform_int_distribution<int> d(allow_zero ? 0 : 1, max_count);
  std::vector<long> counts(size);
  long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& c : counts) total += (c = d(rng));
  }
  std::vector<Rational> w;
  for (long c : counts) w.emplace_back(c, total);
  for (auto& x : w) x.canonicalize();
  return w;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.get_d());
  return out;
}

// Random ambiguity set on a small integer support {lo, ..., lo + width - 1}.
template <class T>
AmbiguitySet<T> random_set(std::mt19937_64& rng, std::size_t max_members = 4, int width = 4, int lo = -2) {
  std::uniform_int_distribution<std::size_t> members(1, max_members);
  const std::size_t m = members(rng);
  std::vector<DiscreteDistribution<T>> out;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<T> pts;
    for (int x = lo; x < lo + width; ++x) pts.push_back(T(x));
    const auto w = random_weights(rng, static_cast<std::size_t>(width));
    std::vector<T> ws;
    for (const auto& q : w) ws.push_back(sublin::NumericTraits<T>::from_rational(q));
    if constexpr (!sublin::NumericTraits<T>::exact) {
      // Renormalize the rounded weights so they sum to one within 1e-12.
      double s = 0;
      for (double x : ws) s += x;
      for (double& x : ws) x /= s;
    }
    out.emplace_back(std::move(pts), std::move(ws));
  }
  return AmbiguitySet<T>(std::move(out));
}

// Random piecewise-linear function through integer nodes with values in [-5, 5].
struct RandomPL {
  std::vector<double> nodes;  // values at -16..16
  double operator()(double x) const {
    const double c = std::clamp(x, -16.0, 16.0) + 16.0;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(c)), nodes.size() - 2);
    const double t = c - static_cast<double>(i);
    return (1 - t) * nodes[i] + t * nodes[i + 1];
  }
};

inline RandomPL random_pl(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  RandomPL f;
  for (int i = 0; i < 33; ++i) f.nodes.push_back(u(rng));
  return f;
}

}  // namespace oracle
