#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sublin/numeric.hpp"

namespace sublin {

enum class PhiOp { number, variable, negate, add, sub, mul, div, call };
enum class PhiFunc { abs, min, max, clamp, pow, sqrt, exp };

struct PhiNode {
  PhiOp op = PhiOp::number;
  Rational number;
  std::size_t variable = 0;
  PhiFunc func = PhiFunc::abs;
  std::vector<PhiNode> args;

  friend bool operator==(const PhiNode&, const PhiNode&) = default;
};

/// A test function written in the small expression language
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'? atom
///   atom   := NUMBER | VAR | '(' expr ')' | FUNC '(' expr (',' expr)* ')'
///   FUNC   := abs | min | max | clamp | pow | sqrt | exp
///
/// NUMBER is a decimal literal or a quoted rational "p/q". VAR defaults to
/// `x`; multivariate probes supply their own variable names.
class PhiExpression {
 public:
  static PhiExpression parse(std::string_view text, std::vector<std::string> variables = {"x"});

  [[nodiscard]] const PhiNode& root() const noexcept { return root_; }
  [[nodiscard]] const std::string& text() const noexcept { return text_; }
  [[nodiscard]] const std::vector<std::string>& variables() const noexcept { return variables_; }

  /// True when only {+, -, *, abs, min, max, clamp} appear, so evaluation on
  /// rationals is exact.
  [[nodiscard]] bool exact_compatible() const;

  template <Scalar T>
  [[nodiscard]] T evaluate(std::span<const T> args) const;

  template <Scalar T>
  [[nodiscard]] T operator()(const T& x) const {
    return evaluate<T>(std::span<const T>(&x, 1));
  }

  template <Scalar T>
  [[nodiscard]] RealFunction<T> as_function() const {
    return [self = *this](const T& x) { return self.template operator()<T>(x); };
  }

  /// Fully parenthesized form that reparses to an equal tree.
  [[nodiscard]] std::string to_string() const;

  /// Largest sampled slope on [lo, hi] times a safety factor of 2.
  [[nodiscard]] double estimate_lipschitz(double lo, double hi, std::size_t samples = 10001) const;

  friend bool operator==(const PhiExpression& a, const PhiExpression& b) {
    return a.root_ == b.root_ && a.variables_ == b.variables_;
  }

 private:
  PhiNode root_;
  std::string text_;
  std::vector<std::string> variables_;
};

}  // namespace sublin
