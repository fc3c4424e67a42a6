#include "sublin/phi.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sublin/error.hpp"

namespace sublin {

namespace {

struct FuncInfo {
  std::string_view name;
  PhiFunc func;
  std::size_t min_args;
  std::size_t max_args;
};

constexpr FuncInfo kFuncs[] = {
    {"abs", PhiFunc::abs, 1, 1},     {"min", PhiFunc::min, 2, 64},  {"max", PhiFunc::max, 2, 64},
    {"clamp", PhiFunc::clamp, 3, 3}, {"pow", PhiFunc::pow, 2, 2},   {"sqrt", PhiFunc::sqrt, 1, 1},
    {"exp", PhiFunc::exp, 1, 1},
};

const FuncInfo* find_func(std::string_view name) {
  for (const auto& f : kFuncs) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view func_name(PhiFunc func) {
  for (const auto& f : kFuncs) {
    if (f.func == func) return f.name;
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  PhiNode parse() {
    skip();
    if (pos_ == s_.size()) fail("empty expression");
    PhiNode n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::usage, "syntax error at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  PhiNode expr() {
    PhiNode lhs = term();
    for (;;) {
      PhiOp op;
      if (accept('+')) {
        op = PhiOp::add;
      } else if (accept('-')) {
        op = PhiOp::sub;
      } else {
        return lhs;
      }
      PhiNode rhs = term();
      PhiNode n;
      n.op = op;
      n.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(n);
    }
  }

  PhiNode term() {
    PhiNode lhs = factor();
    for (;;) {
      PhiOp op;
      if (accept('*')) {
        op = PhiOp::mul;
      } else if (accept('/')) {
        op = PhiOp::div;
      } else {
        return lhs;
      }
      PhiNode rhs = factor();
      PhiNode n;
      n.op = op;
      n.args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(n);
    }
  }

  PhiNode factor() {
    if (accept('-')) {
      PhiNode n;
      n.op = PhiOp::negate;
      n.args.push_back(atom());
      return n;
    }
    return atom();
  }

  PhiNode atom() {
    skip();
    if (pos_ == s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      PhiNode n = expr();
      expect(')');
      return n;
    }
    if (c == '"') {
      const std::size_t start = ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
      if (pos_ == s_.size()) fail("unterminated rational literal");
      const auto body = s_.substr(start, pos_ - start);
      ++pos_;
      PhiNode n;
      n.op = PhiOp::number;
      try {
        n.number = parse_rational(body);
      } catch (const Error&) {
        fail("invalid rational literal \"" + std::string(body) + "\"");
      }
      if (n.number < 0) fail("literals are nonnegative; use unary minus");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
        if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
          pos_ = look;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
      }
      PhiNode n;
      n.op = PhiOp::number;
      const std::size_t end = pos_;
      pos_ = start;
      try {
        n.number = parse_rational(s_.substr(start, end - start));
      } catch (const Error&) {
        fail("invalid number");
      }
      pos_ = end;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const auto name = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        const FuncInfo* info = find_func(name);
        if (!info) {
          pos_ = start;
          fail("unknown function '" + std::string(name) + "'");
        }
        ++pos_;
        PhiNode n;
        n.op = PhiOp::call;
        n.func = info->func;
        n.args.push_back(expr());
        while (accept(',')) n.args.push_back(expr());
        expect(')');
        if (n.args.size() < info->min_args || n.args.size() > info->max_args) {
          pos_ = start;
          fail("wrong number of arguments to " + std::string(name));
        }
        return n;
      }
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (vars_[v] == name) {
          PhiNode n;
          n.op = PhiOp::variable;
          n.variable = v;
          return n;
        }
      }
      pos_ = start;
      fail("unknown variable '" + std::string(name) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

bool node_exact(const PhiNode& n) {
  switch (n.op) {
    case PhiOp::div:
      return false;
    case PhiOp::call:
      if (n.func == PhiFunc::pow || n.func == PhiFunc::sqrt || n.func == PhiFunc::exp) return false;
      break;
    default:
      break;
  }
  return std::all_of(n.args.begin(), n.args.end(), node_exact);
}

template <Scalar T>
T eval_node(const PhiNode& n, std::span<const T> x) {
  switch (n.op) {
    case PhiOp::number:
      return NumericTraits<T>::from_rational(n.number);
    case PhiOp::variable:
      return x[n.variable];
    case PhiOp::negate:
      return T(-eval_node<T>(n.args[0], x));
    case PhiOp::add:
      return T(eval_node<T>(n.args[0], x) + eval_node<T>(n.args[1], x));
    case PhiOp::sub:
      return T(eval_node<T>(n.args[0], x) - eval_node<T>(n.args[1], x));
    case PhiOp::mul:
      return T(eval_node<T>(n.args[0], x) * eval_node<T>(n.args[1], x));
    case PhiOp::div: {
      const T den = eval_node<T>(n.args[1], x);
      if (den == 0) throw Error(ErrorKind::numerical_failure, "division by zero in test function");
      return T(eval_node<T>(n.args[0], x) / den);
    }
    case PhiOp::call:
      break;
  }
  switch (n.func) {
    case PhiFunc::abs:
      return abs_value<T>(eval_node<T>(n.args[0], x));
    case PhiFunc::min: {
      T v = eval_node<T>(n.args[0], x);
      for (std::size_t i = 1; i < n.args.size(); ++i) v = std::min<T>(v, eval_node<T>(n.args[i], x));
      return v;
    }
    case PhiFunc::max: {
      T v = eval_node<T>(n.args[0], x);
      for (std::size_t i = 1; i < n.args.size(); ++i) v = std::max<T>(v, eval_node<T>(n.args[i], x));
      return v;
    }
    case PhiFunc::clamp: {
      const T v = eval_node<T>(n.args[0], x);
      const T lo = eval_node<T>(n.args[1], x);
      const T hi = eval_node<T>(n.args[2], x);
      if (hi < lo) throw Error(ErrorKind::numerical_failure, "clamp with upper bound below lower bound");
      return std::min<T>(std::max<T>(v, lo), hi);
    }
    case PhiFunc::pow:
    case PhiFunc::sqrt:
    case PhiFunc::exp:
      if constexpr (NumericTraits<T>::exact) {
        throw Error(ErrorKind::usage,
                    "pow, sqrt and exp are not available in exact-rational mode");
      } else {
        double r;
        if (n.func == PhiFunc::pow) {
          r = std::pow(eval_node<T>(n.args[0], x), eval_node<T>(n.args[1], x));
        } else if (n.func == PhiFunc::sqrt) {
          r = std::sqrt(eval_node<T>(n.args[0], x));
        } else {
          r = std::exp(eval_node<T>(n.args[0], x));
        }
        if (!std::isfinite(r)) throw Error(ErrorKind::numerical_failure, "non-finite test function value");
        return r;
      }
  }
  return T(0);
}

std::string print_node(const PhiNode& n, const std::vector<std::string>& vars) {
  switch (n.op) {
    case PhiOp::number:
      if (n.number.get_den() == 1) return n.number.get_num().get_str();
      return "\"" + n.number.get_str() + "\"";
    case PhiOp::variable:
      return vars[n.variable];
    case PhiOp::negate:
      return "-(" + print_node(n.args[0], vars) + ")";
    case PhiOp::add:
    case PhiOp::sub:
    case PhiOp::mul:
    case PhiOp::div: {
      const char* op = n.op == PhiOp::add ? " + " : n.op == PhiOp::sub ? " - " : n.op == PhiOp::mul ? " * " : " / ";
      return "(" + print_node(n.args[0], vars) + op + print_node(n.args[1], vars) + ")";
    }
    case PhiOp::call: {
      std::string s(func_name(n.func));
      s += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += ", ";
        s += print_node(n.args[i], vars);
      }
      return s + ")";
    }
  }
  return {};
}

}  // namespace

PhiExpression PhiExpression::parse(std::string_view text, std::vector<std::string> variables) {
  if (variables.empty()) throw Error(ErrorKind::usage, "test function needs at least one variable");
  PhiExpression e;
  e.root_ = Parser(text, variables).parse();
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  return e;
}

bool PhiExpression::exact_compatible() const { return node_exact(root_); }

template <Scalar T>
T PhiExpression::evaluate(std::span<const T> args) const {
  if (args.size() != variables_.size()) {
    throw Error(ErrorKind::usage, "test function called with the wrong number of arguments");
  }
  if constexpr (NumericTraits<T>::exact) {
    if (!exact_compatible()) {
      throw Error(ErrorKind::usage, "expression uses operations unavailable in exact-rational mode");
    }
  }
  return eval_node<T>(root_, args);
}

template double PhiExpression::evaluate<double>(std::span<const double>) const;
template Rational PhiExpression::evaluate<Rational>(std::span<const Rational>) const;

std::string PhiExpression::to_string() const { return print_node(root_, variables_); }

double PhiExpression::estimate_lipschitz(double lo, double hi, std::size_t samples) const {
  if (!(hi > lo) || samples < 2) return 0.0;
  const double step = (hi - lo) / static_cast<double>(samples - 1);
  double prev = operator()<double>(lo);
  double slope = 0;
  for (std::size_t i = 1; i < samples; ++i) {
    const double v = operator()<double>(lo + step * static_cast<double>(i));
    slope = std::max(slope, std::fabs(v - prev) / step);
    prev = v;
  }
  return 2.0 * slope;
}

}  // namespace sublin
