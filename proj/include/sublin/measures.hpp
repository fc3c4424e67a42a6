#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/lp.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

template <Scalar T>
struct Atom {
  T point;
  T weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// A probability law with finite real support.
///
/// Atoms are kept sorted by point; duplicate points merge their weights.
/// Zero-weight atoms are retained.
template <Scalar T>
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<T> points, std::vector<T> weights) {
    if (points.size() != weights.size()) {
      throw Error(ErrorKind::invalid_model, "atoms and probs differ in length");
    }
    if (points.empty()) {
      throw Error(ErrorKind::invalid_model, "distribution without atoms");
    }
    std::vector<Atom<T>> raw;
    raw.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      require_finite(points[i], "distribution atom");
      require_finite(weights[i], "distribution weight");
      if (weights[i] < 0) {
        throw Error(ErrorKind::invalid_model, "negative probability weight");
      }
      raw.push_back({std::move(points[i]), std::move(weights[i])});
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const Atom<T>& a, const Atom<T>& b) { return a.point < b.point; });
    for (auto& a : raw) {
      if (!atoms_.empty() && atoms_.back().point == a.point) {
        atoms_.back().weight += a.weight;
      } else {
        atoms_.push_back(std::move(a));
      }
    }
    Accumulator<T> total;
    for (const auto& a : atoms_) total.add(a.weight);
    const T deviation = abs_value<T>(total.value() - T(1));
    bool ok;
    if constexpr (NumericTraits<T>::exact) {
      ok = deviation == 0;
    } else {
      ok = deviation <= NumericTraits<T>::weight_tol;
    }
    if (!ok) {
      throw Error(ErrorKind::invalid_model, "probability weights do not sum to 1");
    }
  }

  static DiscreteDistribution dirac(T point) {
    return DiscreteDistribution({std::move(point)}, {T(1)});
  }

  [[nodiscard]] const std::vector<Atom<T>>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }

  [[nodiscard]] T expectation(const RealFunction<T>& f) const {
    Accumulator<T> acc;
    for (const auto& a : atoms_) {
      if (a.weight == 0) continue;
      T fx = f(a.point);
      require_finite(fx, "test function");
      acc.add(fx * a.weight);
    }
    T value = acc.value();
    require_finite(value, "expectation");
    return value;
  }

  [[nodiscard]] T probability(const EventPredicate<T>& event) const {
    Accumulator<T> acc;
    for (const auto& a : atoms_) {
      if (event(a.point)) acc.add(a.weight);
    }
    return acc.value();
  }

  /// Weight at `point`, zero when it is not an atom.
  [[nodiscard]] T weight_at(const T& point) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), point,
                               [](const Atom<T>& a, const T& p) { return a.point < p; });
    if (it != atoms_.end() && it->point == point) return it->weight;
    return T(0);
  }

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

 private:
  std::vector<Atom<T>> atoms_;
};

/// A finite, nonempty credal set of laws.
template <Scalar T>
class AmbiguitySet {
 public:
  explicit AmbiguitySet(std::vector<DiscreteDistribution<T>> members, std::string label = {})
      : members_(std::move(members)), label_(std::move(label)) {
    if (members_.empty()) {
      throw Error(ErrorKind::invalid_model, "ambiguity set must be nonempty");
    }
  }

  [[nodiscard]] const std::vector<DiscreteDistribution<T>>& members() const noexcept {
    return members_;
  }
  [[nodiscard]] const DiscreteDistribution<T>& operator[](std::size_t i) const {
    return members_[i];
  }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

  /// Sorted union of all atoms of all members.
  [[nodiscard]] std::vector<T> support() const {
    std::vector<T> pts;
    for (const auto& m : members_) {
      for (const auto& a : m.atoms()) pts.push_back(a.point);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

 private:
  std::vector<DiscreteDistribution<T>> members_;
  std::string label_;
};

/// Value of a sup/inf over members together with the attaining member.
template <Scalar T>
struct Extremum {
  T value;
  std::size_t index;
};

template <Scalar T>
[[nodiscard]] Extremum<T> upper_expectation(const AmbiguitySet<T>& set, const RealFunction<T>& f) {
  Extremum<T> best{set[0].expectation(f), 0};
  for (std::size_t i = 1; i < set.size(); ++i) {
    T v = set[i].expectation(f);
    if (v > best.value) best = {std::move(v), i};
  }
  return best;
}

template <Scalar T>
[[nodiscard]] Extremum<T> lower_expectation(const AmbiguitySet<T>& set, const RealFunction<T>& f) {
  auto neg = upper_expectation<T>(set, [&f](const T& x) { return T(-f(x)); });
  return {T(-neg.value), neg.index};
}

/// V(A): the largest member probability of the event.
template <Scalar T>
[[nodiscard]] Extremum<T> upper_probability(const AmbiguitySet<T>& set,
                                            const EventPredicate<T>& event) {
  Extremum<T> best{set[0].probability(event), 0};
  for (std::size_t i = 1; i < set.size(); ++i) {
    T p = set[i].probability(event);
    if (p > best.value) best = {std::move(p), i};
  }
  return best;
}

/// v(A) = 1 - V(A^c).
template <Scalar T>
[[nodiscard]] Extremum<T> lower_probability(const AmbiguitySet<T>& set,
                                            const EventPredicate<T>& event) {
  auto complement = upper_probability<T>(set, [&event](const T& x) { return !event(x); });
  return {T(1 - complement.value), complement.index};
}

/// Members as probability vectors over `support`.
template <Scalar T>
[[nodiscard]] std::vector<std::vector<T>> probability_vectors(const AmbiguitySet<T>& set,
                                                              const std::vector<T>& support) {
  std::vector<std::vector<T>> out;
  out.reserve(set.size());
  for (const auto& m : set.members()) {
    std::vector<T> v;
    v.reserve(support.size());
    for (const auto& x : support) v.push_back(m.weight_at(x));
    out.push_back(std::move(v));
  }
  return out;
}

/// Identical distribution on finite supports: the two sets induce the same
/// upper expectation for every test function iff their convex hulls agree.
template <Scalar T>
[[nodiscard]] bool same_distribution(const AmbiguitySet<T>& a, const AmbiguitySet<T>& b) {
  std::vector<T> support = a.support();
  {
    auto sb = b.support();
    support.insert(support.end(), sb.begin(), sb.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
  }
  const auto va = probability_vectors(a, support);
  const auto vb = probability_vectors(b, support);
  for (const auto& p : va) {
    if (!in_convex_hull<T>(p, vb)) return false;
  }
  for (const auto& p : vb) {
    if (!in_convex_hull<T>(p, va)) return false;
  }
  return true;
}

}  // namespace sublin
