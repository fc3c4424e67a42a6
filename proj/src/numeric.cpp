#include "sublin/numeric.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

namespace sublin {

namespace {

Rational pow10(long exponent) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0) return Rational(p);
  return Rational(mpz_class(1), p);
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  auto fail = [&]() -> Rational {
    throw Error(ErrorKind::usage, "invalid number '" + std::string(original) + "'");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits.push_back(text[i++]);
    seen_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits.push_back(text[i++]);
      ++frac_digits;
      seen_digit = true;
    }
  }
  if (!seen_digit) return fail();
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    const char* first = text.data() + i;
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc{} || ptr == first) return fail();
    i = static_cast<std::size_t>(ptr - text.data());
  }
  if (i != text.size()) return fail();
  Rational q(mpz_class(digits, 10));
  q *= pow10(exponent - frac_digits);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  if (text.empty()) throw Error(ErrorKind::usage, "empty number");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text, original);
  const Rational num = parse_decimal(trim(text.substr(0, slash)), original);
  const Rational den = parse_decimal(trim(text.substr(slash + 1)), original);
  if (den == 0) throw Error(ErrorKind::usage, "zero denominator in '" + std::string(original) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::numerical_failure, "non-finite number");
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error(ErrorKind::numerical_failure, "cannot format number");
  return parse_decimal(std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())), "");
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::string format_double(double x) {
  std::array<char, 48> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return std::string(buf.data());
}

}  // namespace sublin
