#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <functional>
#include <string>
#include <string_view>

#include "sublin/error.hpp"

namespace sublin {

using Rational = mpq_class;

enum class NumericMode { float64, exact_rational };

// Accepts "p/q", integers, and decimals with an optional exponent
// ("0.25", "-1.5e-3"); decimals are converted exactly.
[[nodiscard]] Rational parse_rational(std::string_view text);

// Exact rational value of the shortest decimal that round-trips to x,
// so 0.4 maps to 2/5 rather than its binary expansion.
[[nodiscard]] Rational rational_from_double(double x);

[[nodiscard]] std::string to_string(const Rational& q);

// 17 significant digits, the fixed format used for every emitted table.
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] inline double to_double(const Rational& q) { return q.get_d(); }
[[nodiscard]] inline double to_double(double x) { return x; }

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
struct NumericTraits;

template <>
struct NumericTraits<double> {
  static constexpr bool exact = false;
  static constexpr NumericMode mode = NumericMode::float64;
  // Weight-sum tolerance for distributions.
  static constexpr double weight_tol = 1e-12;
  // Verdict tolerance for hull/LP decisions.
  static constexpr double verdict_tol = 1e-9;
  static constexpr double pivot_eps = 1e-12;
  static double from_rational(const Rational& q) { return q.get_d(); }
  static bool is_finite(double x) { return std::isfinite(x); }
};

template <>
struct NumericTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr NumericMode mode = NumericMode::exact_rational;
  static Rational from_rational(const Rational& q) { return q; }
  static bool is_finite(const Rational&) { return true; }
};

template <Scalar T>
[[nodiscard]] T zero_tolerance() {
  if constexpr (NumericTraits<T>::exact) {
    return T(0);
  } else {
    return NumericTraits<T>::verdict_tol;
  }
}

template <Scalar T>
[[nodiscard]] T abs_value(const T& x) {
  if constexpr (NumericTraits<T>::exact) {
    return abs(x);
  } else {
    return std::fabs(x);
  }
}

template <Scalar T>
using RealFunction = std::function<T(const T&)>;

template <Scalar T>
using EventPredicate = std::function<bool(const T&)>;

// Neumaier-compensated sum for doubles; plain exact sum for rationals.
template <Scalar T>
class Accumulator {
 public:
  void add(const T& x) {
    if constexpr (NumericTraits<T>::exact) {
      sum_ += x;
    } else {
      const double t = sum_ + x;
      if (std::fabs(sum_) >= std::fabs(x)) {
        comp_ += (sum_ - t) + x;
      } else {
        comp_ += (x - t) + sum_;
      }
      sum_ = t;
    }
  }

  [[nodiscard]] T value() const {
    if constexpr (NumericTraits<T>::exact) {
      return sum_;
    } else {
      return sum_ + comp_;
    }
  }

 private:
  T sum_{0};
  T comp_{0};
};

template <Scalar T>
void require_finite(const T& x, const char* context) {
  if (!NumericTraits<T>::is_finite(x)) {
    throw Error(ErrorKind::numerical_failure,
                std::string("non-finite value in ") + context);
  }
}

}  // namespace sublin
