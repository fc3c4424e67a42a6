#include "sublin/limits.hpp"

#include <cmath>

namespace sublin {

std::vector<std::size_t> default_schedule(std::size_t n_max) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 1;; decade *= 10) {
    for (std::size_t m : {1, 2, 5}) {
      const std::size_t n = m * decade;
      if (n >= n_max) {
        out.push_back(n_max);
        return out;
      }
      out.push_back(n);
    }
  }
}

bool looks_decaying(const std::vector<double>& values) {
  if (values.empty()) return false;
  double peak = 0;
  for (double v : values) peak = std::max(peak, std::fabs(v));
  const double last = std::fabs(values.back());
  return last <= 1e-12 || (values.size() > 1 && last <= 0.5 * peak);
}

Bounds lln_bounds(const std::function<double(double)>& phi, double mu_lo, double mu_bar,
                  double lipschitz, double tol) {
  if (mu_lo > mu_bar) throw Error(ErrorKind::usage, "lln_bounds requires mu_lo <= mu_bar");
  if (!(tol > 0)) throw Error(ErrorKind::usage, "tolerance must be positive");
  const double width = mu_bar - mu_lo;
  std::size_t intervals = 1;
  if (width > 0 && lipschitz > 0) {
    // Every point is within half a grid step of a node.
    const double needed = std::ceil(0.5 * width * lipschitz / tol);
    intervals = static_cast<std::size_t>(std::min(needed, 1e6));
    intervals = std::max<std::size_t>(intervals, 1);
  }
  Bounds b{phi(mu_lo), phi(mu_lo)};
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double x = i == intervals ? mu_bar
                                    : mu_lo + width * static_cast<double>(i) / static_cast<double>(intervals);
    const double v = phi(x);
    if (!std::isfinite(v)) throw Error(ErrorKind::numerical_failure, "test function is not finite");
    b.lower = std::min(b.lower, v);
    b.upper = std::max(b.upper, v);
  }
  return b;
}

std::size_t exact_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  if (r * r != n) {
    throw Error(ErrorKind::usage, "exact-rational mode needs n to be a perfect square for sqrt(n) scaling");
  }
  return r;
}

}  // namespace sublin
