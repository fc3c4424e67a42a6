#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sublin/error.hpp"
#include "sublin/measures.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

/// Per-step ambiguity sets for X_1..X_n; identical entries model i.i.d.
template <Scalar T>
class StepSequence {
 public:
  explicit StepSequence(std::vector<AmbiguitySet<T>> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw Error(ErrorKind::usage, "step sequence must have n >= 1");
  }

  static StepSequence iid(const AmbiguitySet<T>& set, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::usage, "step sequence must have n >= 1");
    return StepSequence(std::vector<AmbiguitySet<T>>(n, set));
  }

  [[nodiscard]] std::size_t size() const noexcept { return steps_.size(); }
  [[nodiscard]] const AmbiguitySet<T>& operator[](std::size_t i) const { return steps_[i]; }
  [[nodiscard]] const std::vector<AmbiguitySet<T>>& steps() const noexcept { return steps_; }

  /// The first n steps; steps past the end repeat the last one.
  [[nodiscard]] StepSequence extended(std::size_t n) const {
    std::vector<AmbiguitySet<T>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(steps_[std::min(i, steps_.size() - 1)]);
    return StepSequence(std::move(out));
  }

 private:
  std::vector<AmbiguitySet<T>> steps_;
};

/// One member law with atoms expressed as integer multiples of the spacing.
/// Zero-weight atoms are dropped.
template <Scalar T>
struct LatticeMeasure {
  std::vector<std::int64_t> offsets;
  std::vector<T> weights;
};

template <Scalar T>
struct LatticeStep {
  std::vector<LatticeMeasure<T>> measures;
  std::vector<std::int64_t> offsets;  // sorted union over members
};

template <Scalar T>
struct Lattice {
  Rational spacing;
  std::vector<LatticeStep<T>> steps;

  [[nodiscard]] T spacing_as() const { return NumericTraits<T>::from_rational(spacing); }
};

/// Explicit grid to snap float atoms onto, with the largest admissible move.
struct SnapOptions {
  Rational spacing;
  double tolerance = 1e-9;
};

namespace detail {

inline constexpr long kMaxDenominator = 100'000;
inline constexpr double kRationalRelTol = 1e-12;
inline const mpz_class kMaxLatticeIndex = mpz_class(1) << 40;

// Best rational approximation with a bounded denominator (continued
// fractions); nullopt when none is within the relative tolerance.
inline std::optional<Rational> approximate_rational(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  const double target = x;
  const bool negative = x < 0;
  double r = std::fabs(x);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (a > 1e15) break;
    const mpz_class ai(a);
    mpz_class p2 = ai * p1 + p0;
    mpz_class q2 = ai * q1 + q0;
    if (q2 > kMaxDenominator) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double approx = p1.get_d() / q1.get_d();
    if (std::fabs(approx - std::fabs(target)) <= kRationalRelTol * std::max(1.0, std::fabs(target))) {
      Rational q(p1, q1);
      q.canonicalize();
      return negative ? Rational(-q) : q;
    }
    const double frac = r - a;
    if (frac <= 0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

inline Rational rational_gcd(const Rational& a, const Rational& b) {
  mpz_class num = gcd(a.get_num() * b.get_den(), b.get_num() * a.get_den());
  Rational g(num, a.get_den() * b.get_den());
  g.canonicalize();
  return abs(g);
}

template <Scalar T>
Rational exact_atom(const T& x) {
  if constexpr (NumericTraits<T>::exact) {
    return x;
  } else {
    auto q = approximate_rational(x);
    if (!q) {
      throw Error(ErrorKind::no_common_lattice,
                  "atom " + format_double(x) + " has no small-denominator rational form");
    }
    return *q;
  }
}

}  // namespace detail

/// Finds the common spacing h of all atoms (or snaps to a caller-supplied
/// grid) and integerizes every atom.
template <Scalar T>
[[nodiscard]] Lattice<T> lattice_embed(const StepSequence<T>& seq,
                                       const std::optional<SnapOptions>& snap = std::nullopt) {
  Lattice<T> lattice;
  if (snap) {
    if (snap->spacing <= 0) throw Error(ErrorKind::usage, "snap spacing must be positive");
    lattice.spacing = snap->spacing;
  } else {
    Rational h(0);
    for (const auto& set : seq.steps()) {
      for (const auto& m : set.members()) {
        for (const auto& a : m.atoms()) {
          if (a.weight == 0) continue;
          Rational q = detail::exact_atom(a.point);
          if (q == 0) continue;
          h = h == 0 ? Rational(abs(q)) : detail::rational_gcd(h, q);
        }
      }
    }
    lattice.spacing = h == 0 ? Rational(1) : h;
  }
  const Rational& h = lattice.spacing;
  const double h_double = h.get_d();

  for (const auto& set : seq.steps()) {
    LatticeStep<T> step;
    for (const auto& m : set.members()) {
      LatticeMeasure<T> lm;
      for (const auto& a : m.atoms()) {
        if (a.weight == 0) continue;
        std::int64_t index = 0;
        if (snap) {
          const double x = to_double(a.point);
          const double k = std::round(x / h_double);
          if (std::fabs(x - k * h_double) > snap->tolerance || std::fabs(k) > 1e12) {
            throw Error(ErrorKind::no_common_lattice,
                        "atom " + format_double(x) + " is not within tolerance of the snap grid");
          }
          index = static_cast<std::int64_t>(k);
        } else {
          Rational ratio = detail::exact_atom(a.point) / h;
          ratio.canonicalize();
          if (ratio.get_den() != 1) {
            throw Error(ErrorKind::no_common_lattice, "atom is not a multiple of the spacing");
          }
          if (abs(ratio.get_num()) > detail::kMaxLatticeIndex) {
            throw Error(ErrorKind::no_common_lattice, "common lattice is too fine");
          }
          index = ratio.get_num().get_si();
        }
        lm.offsets.push_back(index);
        lm.weights.push_back(a.weight);
        step.offsets.push_back(index);
      }
      step.measures.push_back(std::move(lm));
    }
    std::sort(step.offsets.begin(), step.offsets.end());
    step.offsets.erase(std::unique(step.offsets.begin(), step.offsets.end()), step.offsets.end());
    lattice.steps.push_back(std::move(step));
  }
  return lattice;
}

}  // namespace sublin
