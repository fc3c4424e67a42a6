#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sublin/kernels.hpp"

namespace sublin {

/// The variance interval [sigma_lo^2, sigma_hi^2] of a G-normal law.
class GParams {
 public:
  GParams(double sigma_lo, double sigma_hi);

  [[nodiscard]] double sigma_lo() const noexcept { return lo_; }
  [[nodiscard]] double sigma_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// G(a) = (sigma_hi^2 a^+ - sigma_lo^2 a^-) / 2.
[[nodiscard]] double g_function(double alpha, const GParams& params);

struct GridConfig {
  double dx = 0.01;
  double cfl = 0.4;
  // Half-width of the spatial domain; default 8 max(sigma_hi, 1) + |x| + 1.
  std::optional<double> domain;
  double T = 1.0;
  kernels::Exec exec = kernels::Exec::parallel;
};

/// Solution of the G-heat equation on [-L, L] at the final time T.
struct GridFunction {
  double L = 0;
  double dx = 0;
  double dt = 0;
  double T = 0;
  std::size_t time_steps = 0;
  std::vector<double> values;  // u(T, -L + j dx)

  /// Linear interpolation in x.
  [[nodiscard]] double at(double x) const;
};

/// Explicit monotone scheme for  u_t = G(u_xx),  u(0, .) = phi.
/// Throws a configuration error when cfl is outside (0, 1].
[[nodiscard]] GridFunction solve_g_heat(const std::function<double(double)>& phi,
                                        const GParams& params, const GridConfig& grid,
                                        double x_of_interest = 0.0);

/// E[phi(xi)] for xi ~ N(0, [sigma_lo^2, sigma_hi^2]), i.e. u(1, 0).
[[nodiscard]] double g_normal_expectation(const std::function<double(double)>& phi,
                                          const GParams& params, GridConfig grid = {});

/// Classical oracle: integral of phi(sigma z) against the standard normal
/// density, by adaptive Gauss-Kronrod on [-12, 12].
[[nodiscard]] double gaussian_quadrature(const std::function<double(double)>& phi, double sigma);

}  // namespace sublin
