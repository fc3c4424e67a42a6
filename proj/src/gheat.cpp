#include "sublin/gheat.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sublin/error.hpp"

namespace sublin {

GParams::GParams(double sigma_lo, double sigma_hi) : lo_(sigma_lo), hi_(sigma_hi) {
  if (!std::isfinite(lo_) || !std::isfinite(hi_) || lo_ < 0 || lo_ > hi_) {
    throw Error(ErrorKind::usage, "G-normal parameters must satisfy 0 <= sigma_lo <= sigma_hi < inf");
  }
}

double g_function(double alpha, const GParams& params) {
  const double pos = std::max(alpha, 0.0);
  const double neg = std::max(-alpha, 0.0);
  return 0.5 * (params.sigma_hi() * params.sigma_hi() * pos -
                params.sigma_lo() * params.sigma_lo() * neg);
}

double GridFunction::at(double x) const {
  const double s = (x + L) / dx;
  if (s < 0 || s > static_cast<double>(values.size() - 1)) {
    throw Error(ErrorKind::usage, "query point outside the solution domain");
  }
  const auto j = std::min(static_cast<std::size_t>(s), values.size() - 2);
  const double w = s - static_cast<double>(j);
  return (1 - w) * values[j] + w * values[j + 1];
}

GridFunction solve_g_heat(const std::function<double(double)>& phi, const GParams& params,
                          const GridConfig& grid, double x_of_interest) {
  if (!(grid.dx > 0) || !std::isfinite(grid.dx)) {
    throw Error(ErrorKind::configuration, "dx must be positive");
  }
  if (!(grid.cfl > 0) || grid.cfl > 1) {
    throw Error(ErrorKind::configuration, "cfl must lie in (0, 1] for a monotone scheme");
  }
  if (!(grid.T >= 0) || !std::isfinite(grid.T)) {
    throw Error(ErrorKind::configuration, "T must be nonnegative");
  }
  const double half_width =
      grid.domain.value_or(8.0 * std::max(params.sigma_hi(), 1.0) + std::fabs(x_of_interest) + 1.0);
  if (!(half_width > 0)) throw Error(ErrorKind::configuration, "domain must be positive");

  const auto cells = static_cast<std::size_t>(std::ceil(half_width / grid.dx));
  GridFunction sol;
  sol.dx = grid.dx;
  sol.L = static_cast<double>(cells) * grid.dx;
  sol.T = grid.T;
  const std::size_t nodes = 2 * cells + 1;
  if (nodes < 5) throw Error(ErrorKind::configuration, "grid too coarse for the domain");
  sol.values.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double x = (static_cast<double>(j) - static_cast<double>(cells)) * grid.dx;
    sol.values[j] = phi(x);
    if (!std::isfinite(sol.values[j])) {
      throw Error(ErrorKind::numerical_failure, "initial condition is not finite");
    }
  }

  const double hi2 = params.sigma_hi() * params.sigma_hi();
  const double lo2 = params.sigma_lo() * params.sigma_lo();
  // G vanishes identically: the solution is phi for all t.
  if (hi2 == 0 || grid.T == 0) return sol;

  const double dt_max = grid.cfl * grid.dx * grid.dx / hi2;
  sol.time_steps = static_cast<std::size_t>(std::ceil(grid.T / dt_max));
  sol.dt = grid.T / static_cast<double>(sol.time_steps);

  std::vector<double> next(nodes);
  for (std::size_t m = 0; m < sol.time_steps; ++m) {
    kernels::g_heat_step(grid.exec, sol.values, next, sol.dt, grid.dx, lo2, hi2);
    sol.values.swap(next);
  }
  for (double v : sol.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::numerical_failure, "G-heat solution is not finite");
  }
  return sol;
}

double g_normal_expectation(const std::function<double(double)>& phi, const GParams& params,
                            GridConfig grid) {
  grid.T = 1.0;
  if (params.sigma_hi() == 0) return phi(0.0);
  return solve_g_heat(phi, params, grid).at(0.0);
}

double gaussian_quadrature(const std::function<double(double)>& phi, double sigma) {
  if (!(sigma >= 0)) throw Error(ErrorKind::usage, "sigma must be nonnegative");
  if (sigma == 0) return phi(0.0);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) { return phi(sigma * z) * norm * std::exp(-0.5 * z * z); };
  double error = 0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -12.0, 12.0, 25, 1e-14, &error);
  if (!std::isfinite(value)) throw Error(ErrorKind::numerical_failure, "quadrature diverged");
  return value;
}

}  // namespace sublin
